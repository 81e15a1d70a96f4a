// File formats shared by the pipeline stages: density-matrix JSON, counts
// JSON, report JSON, scenario config JSON and the fringe CSV. Writers emit
// full double precision (17 significant digits) so artifacts round-trip and
// identical runs produce byte-identical files.
#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "biphoton/entanglement.hpp"
#include "biphoton/measurement.hpp"
#include "biphoton/qstate.hpp"
#include "biphoton/spdc.hpp"

namespace biphoton {

// Missing, unreadable or malformed input file.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// {"basis": "HH,HV,VH,VV", "re": [[4x4]], "im": [[4x4]]}. The raw-matrix
// overloads exist so illegitimate linear-inversion estimates can be stored.
void write_density_matrix(const std::string& path, const Eigen::Matrix4cd& rho);
Eigen::Matrix4cd read_density_matrix(const std::string& path);

// JSON array of {"alice", "bob", "coincidences", "exposure"}; the
// polarization fields hold tokens understood by parse_polarization_token.
void write_counts(const std::string& path, const std::vector<TomographyRecord>& records);
std::vector<TomographyRecord> read_counts(const std::string& path);

void write_entanglement_report(const std::string& path, const EntanglementReport& report);

struct ReconstructionSummary {
    double objective = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    double min_eigenvalue_raw = 0.0;
};
void write_reconstruction_summary(const std::string& path, const ReconstructionSummary& s);

struct CoherenceSummary {
    cd value;
    double sigma_t_fs = 0.0;
    double tau_fs = 0.0;
    std::optional<double> bandwidth_nm;
};
void write_coherence(const std::string& path, const CoherenceSummary& s);

// {"bandwidth_nm": f, "center_nm": f, "tau_fs": f, "sigma_t_fs": optional f};
// bandwidth_nm may be omitted only when sigma_t_fs is given.
FilterScenario read_scenario(const std::string& path);

// Correlation fringes vs Bob's polarizer angle (0-180 degrees in 5-degree
// steps) with Alice fixed at 45 and 135 degrees: per-pair coincidence
// probabilities and correlation values.
void write_fringes(const std::string& path, const DensityMatrix& rho);

}  // namespace biphoton
