// Entanglement and nonlocality measures for two-qubit states: Wootters
// concurrence, von Neumann entropy and CHSH statistics bundled into a report.
#pragma once

#include <array>

#include "biphoton/measurement.hpp"
#include "biphoton/qstate.hpp"

namespace biphoton {

// Everything the analyze stage emits for one state.
struct EntanglementReport {
    double concurrence = 0.0;
    double entropy_nats = 0.0;
    double entropy_bits = 0.0;
    std::array<double, 4> eigenvalues{};  // descending
    double s_fixed = 0.0;                 // CHSH value at the supplied angles
    double s_max = 0.0;                   // CHSH value optimized over angles
    bool violates_chsh = false;           // s_fixed > 2
};

// Wootters concurrence. Computed from the singular values of
// sqrt(rho) * (sigma_y (x) sigma_y) * conj(sqrt(rho)), which equal the usual
// lambda_i; the singular-value route avoids the precision loss of taking
// square roots of near-zero eigenvalues of rho * rho_tilde.
double concurrence(const DensityMatrix& rho);

// Von Neumann entropy -sum(lambda ln lambda) in nats. Eigenvalues at or
// below zero contribute nothing.
double von_neumann_entropy(const DensityMatrix& rho);

// Full report with CHSH evaluated at the given (default: standard) angles.
EntanglementReport report(const DensityMatrix& rho);
EntanglementReport report(const DensityMatrix& rho, const AngleSet& angles);

}  // namespace biphoton
