// Shared test helpers: seeded random states, noiseless forward models and
// independent oracles used to cross-check the library implementations.
#pragma once

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <vector>

#include "biphoton/measurement.hpp"
#include "biphoton/qstate.hpp"
#include "biphoton/rng.hpp"

namespace biphoton::testing {

inline cd random_unit_complex(Engine& eng) {
    return cd(standard_normal(eng), standard_normal(eng));
}

inline Ket2 random_ket2(Engine& eng) {
    Eigen::Vector2cd v;
    do {
        v << random_unit_complex(eng), random_unit_complex(eng);
    } while (v.norm() < 1e-6);
    return Ket2::normalized(v);
}

inline Ket4 random_ket4(Engine& eng) {
    Eigen::Vector4cd v;
    do {
        for (int i = 0; i < 4; ++i) {
            v(i) = random_unit_complex(eng);
        }
    } while (v.norm() < 1e-6);
    return Ket4::normalized(v);
}

// Random full-support density matrix: G G^dag / Tr for a complex Gaussian G.
inline Eigen::Matrix4cd random_density_raw(Engine& eng) {
    Eigen::Matrix4cd g;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            g(i, j) = random_unit_complex(eng);
        }
    }
    Eigen::Matrix4cd rho = g * g.adjoint();
    rho /= rho.trace().real();
    return rho;
}

inline DensityMatrix random_density(Engine& eng) {
    return validate(random_density_raw(eng));
}

// Strictly full-rank variant (min eigenvalue >= 0.3/4) for tests that cannot
// tolerate near-singular states.
inline DensityMatrix random_full_rank_density(Engine& eng) {
    const Eigen::Matrix4cd mixed =
        0.7 * random_density_raw(eng) + 0.3 * 0.25 * Eigen::Matrix4cd::Identity();
    return validate(mixed);
}

inline Eigen::Matrix4cd random_hermitian(Engine& eng) {
    Eigen::Matrix4cd a;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            a(i, j) = random_unit_complex(eng);
        }
    }
    return 0.5 * (a + a.adjoint().eval());
}

inline double max_abs_diff(const Eigen::Matrix4cd& a, const Eigen::Matrix4cd& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

inline double trace_distance(const Eigen::Matrix4cd& a, const Eigen::Matrix4cd& b) {
    const Eigen::JacobiSVD<Eigen::Matrix4cd> svd(a - b);
    return 0.5 * svd.singularValues().sum();
}

// Exact expected counts (real-valued, no rounding, no noise).
inline std::vector<TomographyRecord> noiseless_records(const DensityMatrix& rho,
                                                       double exposure) {
    std::vector<TomographyRecord> records;
    for (const auto& s : standard_tomography_set()) {
        records.push_back({s, exposure * born_probability(rho, s), exposure});
    }
    return records;
}

// Brute-force CHSH maximization oracle on a 1-degree grid. Uses the
// separability of S = [E(a1,b1) - E(a1,b2)] + [E(a2,b1) + E(a2,b2)] in the
// two Alice angles: precompute E on the grid, then for every Bob pair take
// the best difference and best sum over a single Alice angle each.
inline double brute_force_chsh(const DensityMatrix& rho) {
    constexpr int kN = 180;  // 1-degree steps over [0, 180)
    std::vector<double> e(static_cast<std::size_t>(kN) * kN);
    for (int a = 0; a < kN; ++a) {
        for (int b = 0; b < kN; ++b) {
            e[static_cast<std::size_t>(a) * kN + b] =
                correlation(rho, static_cast<double>(a), static_cast<double>(b));
        }
    }
    double best = 0.0;
    for (int b1 = 0; b1 < kN; ++b1) {
        for (int b2 = 0; b2 < kN; ++b2) {
            double max_diff = -2.0, min_diff = 2.0, max_sum = -2.0, min_sum = 2.0;
            for (int a = 0; a < kN; ++a) {
                const double e1 = e[static_cast<std::size_t>(a) * kN + b1];
                const double e2 = e[static_cast<std::size_t>(a) * kN + b2];
                max_diff = std::max(max_diff, e1 - e2);
                min_diff = std::min(min_diff, e1 - e2);
                max_sum = std::max(max_sum, e1 + e2);
                min_sum = std::min(min_sum, e1 + e2);
            }
            best = std::max({best, max_diff + max_sum, -(min_diff + min_sum)});
        }
    }
    return best;
}

}  // namespace biphoton::testing
