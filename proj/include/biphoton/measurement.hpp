// measurement.hpp
// Projective polarization measurements: the 16-setting tomography set,
// Born-rule probabilities, Poisson coincidence simulation, polarization
// correlation functions and Bell-CHSH values.

#pragma once

#include "biphoton/qstate.hpp"
#include "biphoton/rng.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace biphoton {

// Thrown by correlation() when all four coincidence probabilities vanish.
class UndefinedCorrelation : public std::runtime_error {
public:
    UndefinedCorrelation() : std::runtime_error("correlation undefined: zero total rate") {}
};

// One joint projective setting. Tokens are the serialized polarization
// labels ("H", "V", "D", "R", "L", or a polarizer angle in degrees).
struct ProjectionSetting {
    Ket2 alice;
    Ket2 bob;
    std::string alice_token;
    std::string bob_token;

    std::string label() const { return alice_token + bob_token; }
};

// One tomography measurement: a setting, the observed coincidence count and
// the expected total pairs per setting. The count is kept as a double so
// noiseless forward-model records stay exact; simulated counts are integral.
struct TomographyRecord {
    ProjectionSetting setting;
    double coincidences = 0.0;
    double exposure = 0.0;
};

// Two polarizer angles per party, degrees, wrapped into [0, 180).
struct AngleSet {
    AngleSet(double a1, double a2, double b1, double b2);

    std::array<double, 2> alice_angles;
    std::array<double, 2> bob_angles;
};

// a = {0, 45}, b = {22.5, 67.5}; reproduces the measured S values and is
// optimal for the Bell state.
AngleSet default_chsh_angles();

// Parses a polarization token: one of H,V,D,R,L or a polarizer angle in
// degrees. Throws std::invalid_argument on anything else.
Ket2 parse_polarization_token(const std::string& token);

// Alice {H,V,D,R} x Bob {H,V,D,L} in Alice-major order, 16 settings.
std::vector<ProjectionSetting> standard_tomography_set();

// <psi_A (x) psi_B| rho |psi_A (x) psi_B>, clamped to [0,1]. Throws
// std::domain_error if the quadratic form is negative beyond tolerance.
double born_probability(const DensityMatrix& rho, const ProjectionSetting& s);

// Poisson coincidence counts with mean exposure * born_probability per
// setting. Per-setting streams derive from (seed, setting index), so the
// output is reproducible and independent of evaluation order.
std::vector<TomographyRecord> simulate_counts(const DensityMatrix& rho,
                                              const std::vector<ProjectionSetting>& settings,
                                              double exposure,
                                              std::uint64_t seed);

// Polarization correlation E(theta_A, theta_B) from the four coincidence
// probabilities at (theta, theta+90) combinations of linear polarizers.
double correlation(const DensityMatrix& rho, double theta_a_deg, double theta_b_deg);

// S = |E(a1,b1) - E(a1,b2) + E(a2,b1) + E(a2,b2)|.
double chsh_fixed(const DensityMatrix& rho, const AngleSet& angles);

// Horodecki criterion: S_max = 2 sqrt(m1 + m2) with m1 >= m2 the two largest
// eigenvalues of T^T T, T_ij = Tr[rho sigma_i (x) sigma_j].
double chsh_max(const DensityMatrix& rho);

// Correlation matrix T_ij = Tr[rho sigma_i (x) sigma_j], i,j in {x,y,z}.
Eigen::Matrix3d correlation_matrix(const DensityMatrix& rho);

}  // namespace biphoton
