#include "biphoton/spdc.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <utility>

namespace biphoton {

namespace {

constexpr double kSpeedOfLightNmPerFs = 299.792458;

// Composite trapezoid of f over [lo, hi] with n uniformly spaced nodes.
template <typename F>
auto trapezoid(F&& f, double lo, double hi, std::size_t n) {
    const double h = (hi - lo) / static_cast<double>(n - 1);
    auto acc = 0.5 * (f(lo) + f(hi));
    for (std::size_t k = 1; k + 1 < n; ++k) {
        acc += f(lo + h * static_cast<double>(k));
    }
    return acc * h;
}

// Doubling trapezoid estimate of the |f|^2 integral, used to normalize
// spectra at construction time.
double l2_integral(const std::function<cd(double)>& f, double lo, double hi,
                   std::size_t n0) {
    const auto density = [&](double w) { return std::norm(f(w)); };
    std::size_t n = std::max<std::size_t>(n0 | 1, 1025);
    double prev = trapezoid(density, lo, hi, n);
    for (int pass = 0; pass < 12; ++pass) {
        n = 2 * n - 1;
        const double cur = trapezoid(density, lo, hi, n);
        if (std::abs(cur - prev) <= 1e-10 * std::max(1.0, std::abs(cur))) {
            return cur;
        }
        prev = cur;
    }
    return prev;
}

}  // namespace

WavePacketSpec::WavePacketSpec(double sigma_t, double tau) {
    if (!(sigma_t > 0.0) || !std::isfinite(sigma_t)) {
        throw std::invalid_argument("WavePacketSpec: sigma_t must be positive and finite");
    }
    if (!std::isfinite(tau)) {
        throw std::invalid_argument("WavePacketSpec: tau must be finite");
    }
    sigma_t_fs = sigma_t;
    tau_fs = std::abs(tau);  // overlap depends on |tau| only
}

SpectralAmplitude::SpectralAmplitude(std::function<cd(double)> raw, double lo,
                                     double hi, std::size_t n_points)
    : raw_(std::move(raw)), omega_min_(lo), omega_max_(hi), n_points_(n_points) {
    const double norm = l2_integral(raw_, lo, hi, n_points);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw std::invalid_argument("SpectralAmplitude: |g|^2 integral must be positive");
    }
    scale_ = 1.0 / std::sqrt(norm);
}

SpectralAmplitude SpectralAmplitude::gaussian(double sigma_t_fs) {
    if (!(sigma_t_fs > 0.0) || !std::isfinite(sigma_t_fs)) {
        throw std::invalid_argument("SpectralAmplitude::gaussian: sigma_t must be positive");
    }
    const double s2 = sigma_t_fs * sigma_t_fs;
    // |g|^2 ~ exp(-sigma_t^2 omega^2) has standard deviation 1/(sqrt(2) sigma_t).
    const double half_support = 8.0 / (std::sqrt(2.0) * sigma_t_fs);
    auto raw = [s2](double w) { return cd(std::exp(-0.5 * s2 * w * w), 0.0); };
    return SpectralAmplitude(raw, -half_support, half_support, 4097);
}

SpectralAmplitude SpectralAmplitude::top_hat(double full_width, double center) {
    if (!(full_width > 0.0) || !std::isfinite(full_width) || !std::isfinite(center)) {
        throw std::invalid_argument("SpectralAmplitude::top_hat: width must be positive");
    }
    const double lo = center - 0.5 * full_width;
    const double hi = center + 0.5 * full_width;
    auto raw = [lo, hi](double w) {
        return (w >= lo && w <= hi) ? cd(1.0, 0.0) : cd(0.0, 0.0);
    };
    return SpectralAmplitude(raw, lo, hi, 4097);
}

SpectralAmplitude SpectralAmplitude::from_samples(const std::vector<double>& omega,
                                                  const std::vector<cd>& values) {
    if (omega.size() != values.size() || omega.size() < 2) {
        throw std::invalid_argument("SpectralAmplitude::from_samples: need >= 2 matching samples");
    }
    for (std::size_t i = 0; i < omega.size(); ++i) {
        if (!std::isfinite(omega[i]) || !std::isfinite(values[i].real())
            || !std::isfinite(values[i].imag())) {
            throw std::invalid_argument("SpectralAmplitude::from_samples: non-finite sample");
        }
        if (i > 0 && !(omega[i] > omega[i - 1])) {
            throw std::invalid_argument(
                "SpectralAmplitude::from_samples: frequencies must be strictly increasing");
        }
    }
    auto table = std::make_shared<std::pair<std::vector<double>, std::vector<cd>>>(omega, values);
    auto raw = [table](double w) -> cd {
        const auto& ws = table->first;
        const auto& gs = table->second;
        if (w < ws.front() || w > ws.back()) {
            return cd(0.0, 0.0);
        }
        const auto it = std::upper_bound(ws.begin(), ws.end(), w);
        if (it == ws.begin()) {
            return gs.front();
        }
        const std::size_t hi = std::min<std::size_t>(
            static_cast<std::size_t>(it - ws.begin()), ws.size() - 1);
        const std::size_t lo = hi - 1;
        const double t = (w - ws[lo]) / (ws[hi] - ws[lo]);
        return gs[lo] + t * (gs[hi] - gs[lo]);
    };
    return SpectralAmplitude(raw, omega.front(), omega.back(), omega.size());
}

CoherenceFactor::CoherenceFactor(cd v) : value(v) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        throw std::invalid_argument("CoherenceFactor: value must be finite");
    }
    if (std::abs(v) > 1.0 + 1e-12) {
        throw std::invalid_argument("CoherenceFactor: |C| = " + std::to_string(std::abs(v))
                                    + " exceeds 1");
    }
}

double CoherenceFactor::magnitude() const { return std::abs(value); }

CoherenceFactor coherence_gaussian(const WavePacketSpec& spec) {
    const double t = spec.tau_fs / spec.sigma_t_fs;
    return CoherenceFactor(cd(std::exp(-0.25 * t * t), 0.0));
}

CoherenceFactor coherence_numeric(const SpectralAmplitude& g, double tau_fs) {
    if (!std::isfinite(tau_fs)) {
        throw std::invalid_argument("coherence_numeric: tau must be finite");
    }
    const double lo = g.omega_min();
    const double hi = g.omega_max();
    // Ratio form: dividing by the same-grid norm makes C(0) = 1 exactly and
    // keeps |C| <= 1 for any quadrature resolution (positive weights).
    const auto estimate = [&](std::size_t n) {
        const cd num = trapezoid(
            [&](double w) {
                return std::norm(g(w)) * std::polar(1.0, w * tau_fs);
            },
            lo, hi, n);
        const double den =
            trapezoid([&](double w) { return std::norm(g(w)); }, lo, hi, n);
        return num / den;
    };

    std::size_t n = std::max<std::size_t>(g.n_points() | 1, 1025);
    cd prev = estimate(n);
    double change = 1.0;
    for (int pass = 0; pass < 12; ++pass) {
        n = 2 * n - 1;
        const cd cur = estimate(n);
        change = std::abs(cur - prev);  // |C| <= 1, so this is change on the unit scale
        if (change <= 1e-8) {
            return CoherenceFactor(cur);
        }
        prev = cur;
    }
    if (change <= 1e-6) {
        return CoherenceFactor(prev);
    }
    throw AccuracyError("coherence_numeric: quadrature stalled at grid change "
                        + std::to_string(change));
}

double fit_effective_width(double c_target, double tau_fs) {
    if (!(c_target > 0.0) || !(c_target < 1.0)) {
        throw std::invalid_argument("fit_effective_width: target coherence must lie in (0, 1)");
    }
    if (!(tau_fs > 0.0) || !std::isfinite(tau_fs)) {
        throw std::invalid_argument("fit_effective_width: tau must be positive");
    }
    return tau_fs / (2.0 * std::sqrt(-std::log(c_target)));
}

DensityMatrix rho_from_coherence(const CoherenceFactor& c) {
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
    m(0, 0) = 0.5;
    m(3, 3) = 0.5;
    m(0, 3) = 0.5 * c.value;
    m(3, 0) = 0.5 * std::conj(c.value);
    return validate(m);
}

DensityMatrix rho_from_coherence(cd c) { return rho_from_coherence(CoherenceFactor(c)); }

const std::vector<CatalogEntry>& filter_catalog() {
    static const std::vector<CatalogEntry> catalog = {
        {8.0, fit_effective_width(0.63, 100.0)},
        {1.2, fit_effective_width(0.99, 100.0)},
    };
    return catalog;
}

double physical_sigma_from_bandwidth(double fwhm_bandwidth_nm, double center_nm) {
    if (!(fwhm_bandwidth_nm > 0.0) || !(center_nm > 0.0)) {
        throw std::invalid_argument("physical_sigma_from_bandwidth: inputs must be positive");
    }
    const double delta_nu = kSpeedOfLightNmPerFs * fwhm_bandwidth_nm / (center_nm * center_nm);
    const double delta_t = 0.441 / delta_nu;  // intensity FWHM, fs
    return delta_t / (2.0 * std::sqrt(std::numbers::ln2));
}

PredictionResult predict(const FilterScenario& scenario) {
    double sigma_t = 0.0;
    if (scenario.sigma_t_fs) {
        sigma_t = *scenario.sigma_t_fs;
    } else {
        const auto& catalog = filter_catalog();
        const auto it = std::find_if(catalog.begin(), catalog.end(), [&](const CatalogEntry& e) {
            return std::abs(e.bandwidth_nm - scenario.bandwidth_nm) < 1e-9;
        });
        if (it == catalog.end()) {
            throw std::invalid_argument("predict: bandwidth " + std::to_string(scenario.bandwidth_nm)
                                        + " nm is not in the filter catalog and no sigma_t was given");
        }
        sigma_t = it->sigma_t_fs;
    }
    const WavePacketSpec spec(sigma_t, scenario.tau_fs);
    const CoherenceFactor c = coherence_gaussian(spec);
    DensityMatrix rho = rho_from_coherence(c);
    EntanglementReport rep = report(rho);
    return PredictionResult{c, rho, rep, spec.sigma_t_fs};
}

}  // namespace biphoton
