// Density-matrix reconstruction from 16 tomography records: direct linear
// inversion via the projector dual basis (fast, may leave the physical state
// space) and maximum-likelihood refinement over a Cholesky-style
// parametrization that is positive by construction.
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "biphoton/measurement.hpp"
#include "biphoton/qstate.hpp"

namespace biphoton {

// Thrown when the supplied projector set does not span operator space.
class DegenerateTomography : public std::runtime_error {
public:
    explicit DegenerateTomography(const std::string& what) : std::runtime_error(what) {}
};

// Linear-inversion estimate: Hermitian with unit trace, but possibly with
// negative eigenvalues when counts are noisy.
struct RawReconstruction {
    Eigen::Matrix4cd entries;
    std::array<double, 4> eigenvalues{};  // descending
    double min_eigenvalue = 0.0;
    bool legitimate = false;  // true when entries would pass validate()
};

// 16 real parameters of a lower-triangular complex T with rho = T^dag T
// normalized to unit trace: t[0..3] are the (real) diagonal T00..T33, then
// (re, im) pairs for T10, T20, T21, T30, T31, T32.
struct MleParams {
    std::array<double, 16> t{};
};

struct MleResult {
    DensityMatrix rho;
    double objective = 0.0;
    std::size_t iterations = 0;  // objective evaluations spent
    bool converged = false;
    std::vector<double> objective_history;  // best value after each improvement
};

// rho(t) = T^dag T / Tr[T^dag T]. Positive semidefinite with unit trace for
// any parameters with a nonvanishing trace; throws otherwise.
DensityMatrix mle_state(const MleParams& params);

// Inverts the Born map on the span of the 16 projectors: rho_hat =
// sum_v (n_v / exposure_v) M_v with {M_v} the dual basis obtained from the
// projector overlap (Gram) matrix. The estimate is symmetrized and
// trace-renormalized before the legitimacy verdict is attached.
RawReconstruction linear_invert(const std::vector<TomographyRecord>& records);

// Gaussian-approximation likelihood functional
//   L(t) = sum_v (N_v p_v(t) - n_v)^2 / (2 N_v p_v(t) + 1e-12),
// where p_v is the Born probability of record v under rho(t).
double mle_objective(const MleParams& params, const std::vector<TomographyRecord>& records);

// Warm start for the optimizer: clips the raw estimate's eigenvalues to at
// least 1e-6, renormalizes, and factors the result into triangular form.
MleParams cholesky_init_from_raw(const RawReconstruction& raw);

// Nelder-Mead minimization of mle_objective with 8 seeded restarts (the
// first warm-started from linear inversion, the rest perturbed). Stops a
// restart when the simplex objective spread falls below 1e-10 relative or
// its share of the 1e5-evaluation budget runs out; converged reports whether
// the winning restart stopped by the spread rule.
MleResult mle_reconstruct(const std::vector<TomographyRecord>& records,
                          const std::optional<RawReconstruction>& init,
                          std::uint64_t seed);

}  // namespace biphoton
