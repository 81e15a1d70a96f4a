#include "biphoton/tomography.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>

#include "biphoton/rng.hpp"

namespace biphoton {

namespace {

constexpr double kObjectiveGuard = 1e-12;   // epsilon in the likelihood denominator
constexpr double kDegenerateTrace = 1e-30;  // Tr[T^dag T] below this is unusable

Eigen::Matrix4cd lower_triangular(const MleParams& p) {
    const auto& t = p.t;
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
    m(0, 0) = t[0];
    m(1, 1) = t[1];
    m(2, 2) = t[2];
    m(3, 3) = t[3];
    m(1, 0) = cd(t[4], t[5]);
    m(2, 0) = cd(t[6], t[7]);
    m(2, 1) = cd(t[8], t[9]);
    m(3, 0) = cd(t[10], t[11]);
    m(3, 1) = cd(t[12], t[13]);
    m(3, 2) = cd(t[14], t[15]);
    return m;
}

// rho(t) without validation; returns false when the trace is degenerate.
bool state_from_params(const MleParams& p, Eigen::Matrix4cd& rho) {
    const Eigen::Matrix4cd t = lower_triangular(p);
    rho = t.adjoint() * t;
    const double tr = rho.trace().real();
    if (!(tr > kDegenerateTrace) || !std::isfinite(tr)) {
        return false;
    }
    rho /= tr;
    return true;
}

void check_records(const std::vector<TomographyRecord>& records) {
    if (records.size() != 16) {
        throw std::invalid_argument("tomography: expected 16 records, got "
                                    + std::to_string(records.size()));
    }
    for (const auto& r : records) {
        if (!(r.exposure > 0.0) || !std::isfinite(r.exposure)) {
            throw std::invalid_argument("tomography: record " + r.setting.label()
                                        + " has non-positive exposure");
        }
        if (r.coincidences < 0.0 || !std::isfinite(r.coincidences)) {
            throw std::invalid_argument("tomography: record " + r.setting.label()
                                        + " has a negative or non-finite count");
        }
    }
}

struct ObjectiveData {
    std::vector<Eigen::Vector4cd> psi;
    std::vector<double> exposure;
    std::vector<double> counts;
};

ObjectiveData prepare_objective(const std::vector<TomographyRecord>& records) {
    ObjectiveData d;
    d.psi.reserve(records.size());
    d.exposure.reserve(records.size());
    d.counts.reserve(records.size());
    for (const auto& r : records) {
        d.psi.push_back(tensor(r.setting.alice, r.setting.bob).amplitudes());
        d.exposure.push_back(r.exposure);
        d.counts.push_back(r.coincidences);
    }
    return d;
}

double objective_on_state(const Eigen::Matrix4cd& rho, const ObjectiveData& d) {
    double l = 0.0;
    for (std::size_t v = 0; v < d.psi.size(); ++v) {
        const double p = std::max(0.0, (d.psi[v].adjoint() * rho * d.psi[v]).value().real());
        const double expected = d.exposure[v] * p;
        const double diff = expected - d.counts[v];
        l += diff * diff / (2.0 * expected + kObjectiveGuard);
    }
    return l;
}

// Guarded objective for the optimizer: degenerate parameters score huge
// instead of throwing, so the simplex can walk away from them.
double guarded_objective(const MleParams& p, const ObjectiveData& d) {
    Eigen::Matrix4cd rho;
    if (!state_from_params(p, rho)) {
        return 1e300;
    }
    const double l = objective_on_state(rho, d);
    return std::isfinite(l) ? l : 1e300;
}

struct RestartOutcome {
    MleParams params{};
    double objective = std::numeric_limits<double>::infinity();
    bool stopped_by_rule = false;
};

// One Nelder-Mead run (standard reflection/expansion/contraction/shrink
// coefficients 1, 2, 0.5, 0.5) with a hard evaluation budget. evals is
// incremented for every objective call; history records each global best.
RestartOutcome nelder_mead(const MleParams& start, const ObjectiveData& data,
                           std::size_t budget, std::size_t& evals,
                           double& global_best, std::vector<double>& history) {
    constexpr int kDim = 16;
    struct Vertex {
        MleParams x;
        double f;
    };

    std::size_t used = 0;
    const auto eval = [&](const MleParams& p) {
        ++used;
        ++evals;
        const double f = guarded_objective(p, data);
        if (f < global_best) {
            global_best = f;
            history.push_back(f);
        }
        return f;
    };

    std::vector<Vertex> simplex;
    simplex.reserve(kDim + 1);
    simplex.push_back({start, eval(start)});
    for (int i = 0; i < kDim; ++i) {
        MleParams p = start;
        p.t[i] += std::max(0.05 * std::abs(p.t[i]), 0.01);
        simplex.push_back({p, eval(p)});
    }

    RestartOutcome out;
    const auto by_f = [](const Vertex& a, const Vertex& b) { return a.f < b.f; };
    double f_mark = std::numeric_limits<double>::infinity();
    std::size_t next_check = 500;
    while (used < budget) {
        std::sort(simplex.begin(), simplex.end(), by_f);
        const double f_best = simplex.front().f;
        const double f_worst = simplex.back().f;
        const double rule_scale = 1e-10 * std::max(1.0, std::abs(f_best));
        if (f_worst - f_best <= rule_scale) {
            out.stopped_by_rule = true;
            break;
        }
        // Second reading of the improvement rule: the best objective moved by
        // less than the relative threshold across a 500-evaluation window.
        if (used >= next_check) {
            if (f_mark - f_best < rule_scale) {
                out.stopped_by_rule = true;
                break;
            }
            f_mark = f_best;
            next_check = used + 500;
        }

        MleParams centroid{};
        for (int i = 0; i < kDim; ++i) {
            double s = 0.0;
            for (int v = 0; v < kDim; ++v) {
                s += simplex[v].x.t[i];
            }
            centroid.t[i] = s / kDim;
        }
        const auto blend = [&](double coeff) {
            MleParams p{};
            for (int i = 0; i < kDim; ++i) {
                p.t[i] = centroid.t[i] + coeff * (simplex.back().x.t[i] - centroid.t[i]);
            }
            return p;
        };

        const MleParams reflected = blend(-1.0);
        const double f_reflected = eval(reflected);
        if (f_reflected < f_best) {
            const MleParams expanded = blend(-2.0);
            const double f_expanded = eval(expanded);
            if (f_expanded < f_reflected) {
                simplex.back() = {expanded, f_expanded};
            } else {
                simplex.back() = {reflected, f_reflected};
            }
            continue;
        }
        if (f_reflected < simplex[kDim - 1].f) {
            simplex.back() = {reflected, f_reflected};
            continue;
        }
        const bool outside = f_reflected < f_worst;
        const MleParams contracted = blend(outside ? -0.5 : 0.5);
        const double f_contracted = eval(contracted);
        if (f_contracted < std::min(f_reflected, f_worst)) {
            simplex.back() = {contracted, f_contracted};
            continue;
        }
        for (int v = 1; v <= kDim; ++v) {  // shrink toward the best vertex
            for (int i = 0; i < kDim; ++i) {
                simplex[v].x.t[i] =
                    simplex[0].x.t[i] + 0.5 * (simplex[v].x.t[i] - simplex[0].x.t[i]);
            }
            simplex[v].f = eval(simplex[v].x);
            if (used >= budget) {
                break;
            }
        }
    }

    std::sort(simplex.begin(), simplex.end(), by_f);
    out.params = simplex.front().x;
    out.objective = simplex.front().f;
    return out;
}

}  // namespace

DensityMatrix mle_state(const MleParams& params) {
    Eigen::Matrix4cd rho;
    if (!state_from_params(params, rho)) {
        throw std::invalid_argument("mle_state: Tr[T^dag T] vanishes; parameters are degenerate");
    }
    return validate(rho);
}

RawReconstruction linear_invert(const std::vector<TomographyRecord>& records) {
    check_records(records);

    std::vector<Eigen::Matrix4cd> projectors;
    projectors.reserve(16);
    for (const auto& r : records) {
        const Eigen::Vector4cd psi = tensor(r.setting.alice, r.setting.bob).amplitudes();
        projectors.push_back(psi * psi.adjoint());
    }

    Eigen::Matrix<double, 16, 16> gram;
    for (int a = 0; a < 16; ++a) {
        for (int b = 0; b < 16; ++b) {
            gram(a, b) = (projectors[a] * projectors[b]).trace().real();
        }
    }
    const Eigen::FullPivLU<Eigen::Matrix<double, 16, 16>> lu(gram);
    if (!lu.isInvertible()) {
        throw DegenerateTomography(
            "linear_invert: projector set does not span operator space");
    }
    const Eigen::Matrix<double, 16, 16> dual = lu.inverse();

    Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
    for (int v = 0; v < 16; ++v) {
        const double f = records[v].coincidences / records[v].exposure;
        for (int u = 0; u < 16; ++u) {
            rho += f * dual(v, u) * projectors[u];
        }
    }

    rho = 0.5 * (rho + rho.adjoint().eval());
    const double tr = rho.trace().real();
    if (!(tr > 0.0)) {
        throw std::invalid_argument("linear_invert: estimate has non-positive trace "
                                    "(all counts zero?)");
    }
    rho /= tr;

    RawReconstruction raw;
    raw.entries = rho;
    raw.eigenvalues = eig_hermitian(rho).values;
    raw.min_eigenvalue = raw.eigenvalues[3];
    raw.legitimate = raw.min_eigenvalue >= kPsdTol;
    return raw;
}

double mle_objective(const MleParams& params, const std::vector<TomographyRecord>& records) {
    Eigen::Matrix4cd rho;
    if (!state_from_params(params, rho)) {
        throw std::invalid_argument("mle_objective: Tr[T^dag T] vanishes");
    }
    return objective_on_state(rho, prepare_objective(records));
}

MleParams cholesky_init_from_raw(const RawReconstruction& raw) {
    const Eigen::Matrix4cd sym = 0.5 * (raw.entries + raw.entries.adjoint());
    const EigResult eig = eig_hermitian(sym);

    Eigen::Vector4d clipped;
    for (int i = 0; i < 4; ++i) {
        clipped(i) = std::max(eig.values[i], 1e-6);
    }
    Eigen::Matrix4cd rho =
        eig.vectors * clipped.asDiagonal() * eig.vectors.adjoint();
    rho /= rho.trace().real();

    // rho = T^dag T with T lower triangular: flip the basis order, take the
    // ordinary Cholesky factor there, and flip back. The reversal turns the
    // lower factor into an upper one whose adjoint is the T we need.
    Eigen::Matrix4cd flip = Eigen::Matrix4cd::Zero();
    for (int i = 0; i < 4; ++i) {
        flip(i, 3 - i) = 1.0;
    }
    const Eigen::Matrix4cd reversed = flip * rho * flip;
    const Eigen::LLT<Eigen::Matrix4cd> llt(reversed);
    MleParams params{};
    if (llt.info() != Eigen::Success) {
        params.t = {0.5, 0.5, 0.5, 0.5};  // maximally mixed fallback
        return params;
    }
    const Eigen::Matrix4cd lower = llt.matrixL();
    const Eigen::Matrix4cd t = (flip * lower * flip).adjoint();

    params.t[0] = t(0, 0).real();
    params.t[1] = t(1, 1).real();
    params.t[2] = t(2, 2).real();
    params.t[3] = t(3, 3).real();
    const int offdiag[6][2] = {{1, 0}, {2, 0}, {2, 1}, {3, 0}, {3, 1}, {3, 2}};
    for (int k = 0; k < 6; ++k) {
        params.t[4 + 2 * k] = t(offdiag[k][0], offdiag[k][1]).real();
        params.t[5 + 2 * k] = t(offdiag[k][0], offdiag[k][1]).imag();
    }
    return params;
}

MleResult mle_reconstruct(const std::vector<TomographyRecord>& records,
                          const std::optional<RawReconstruction>& init,
                          std::uint64_t seed) {
    check_records(records);
    const ObjectiveData data = prepare_objective(records);
    const RawReconstruction raw = init ? *init : linear_invert(records);
    const MleParams warm = cholesky_init_from_raw(raw);

    constexpr std::size_t kRestarts = 8;
    constexpr std::size_t kTotalBudget = 100000;

    std::size_t evals = 0;
    double global_best = std::numeric_limits<double>::infinity();
    std::vector<double> history;
    RestartOutcome best;
    for (std::size_t r = 0; r < kRestarts && evals + 600 < kTotalBudget; ++r) {
        MleParams start = warm;
        if (r > 0) {
            Engine eng = make_engine(sub_seed(seed, r));
            for (double& x : start.t) {
                x += 0.1 * standard_normal(eng);
            }
        }
        const RestartOutcome outcome =
            nelder_mead(start, data, kTotalBudget - evals, evals, global_best, history);
        if (outcome.objective < best.objective) {
            best = outcome;
        }
    }

    return MleResult{mle_state(best.params), best.objective, evals,
                     best.stopped_by_rule, std::move(history)};
}

}  // namespace biphoton
