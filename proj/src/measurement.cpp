#include "biphoton/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace biphoton {

namespace {

double wrap_angle_180(double deg) {
    double a = std::fmod(deg, 180.0);
    if (a < 0.0) {
        a += 180.0;
    }
    return a;
}

}  // namespace

AngleSet::AngleSet(double a1, double a2, double b1, double b2)
    : alice_angles{wrap_angle_180(a1), wrap_angle_180(a2)},
      bob_angles{wrap_angle_180(b1), wrap_angle_180(b2)} {}

AngleSet default_chsh_angles() {
    return AngleSet(0.0, 45.0, 22.5, 67.5);
}

Ket2 parse_polarization_token(const std::string& token) {
    if (token == "H") return ket_h();
    if (token == "V") return ket_v();
    if (token == "D") return ket_d();
    if (token == "R") return ket_r();
    if (token == "L") return ket_l();
    try {
        std::size_t used = 0;
        const double angle = std::stod(token, &used);
        if (used == token.size()) {
            return linear_ket(angle);
        }
    } catch (const std::exception&) {
    }
    throw std::invalid_argument("unknown polarization token '" + token
                                + "' (expected H, V, D, R, L or an angle in degrees)");
}

std::vector<ProjectionSetting> standard_tomography_set() {
    const std::pair<Ket2, std::string> alice[] = {
        {ket_h(), "H"}, {ket_v(), "V"}, {ket_d(), "D"}, {ket_r(), "R"}};
    const std::pair<Ket2, std::string> bob[] = {
        {ket_h(), "H"}, {ket_v(), "V"}, {ket_d(), "D"}, {ket_l(), "L"}};

    std::vector<ProjectionSetting> settings;
    settings.reserve(16);
    for (const auto& [a, a_tok] : alice) {
        for (const auto& [b, b_tok] : bob) {
            settings.push_back({a, b, a_tok, b_tok});
        }
    }
    return settings;
}

double born_probability(const DensityMatrix& rho, const ProjectionSetting& s) {
    const Eigen::Vector4cd psi = tensor(s.alice, s.bob).amplitudes();
    const double p = (psi.adjoint() * rho.matrix() * psi).value().real();
    if (p < -1e-9) {
        throw std::domain_error("born_probability: negative probability "
                                + std::to_string(p) + " signals an invalid state");
    }
    return std::clamp(p, 0.0, 1.0);
}

std::vector<TomographyRecord> simulate_counts(const DensityMatrix& rho,
                                              const std::vector<ProjectionSetting>& settings,
                                              double exposure,
                                              std::uint64_t seed) {
    if (exposure <= 0.0) {
        throw std::invalid_argument("simulate_counts: exposure must be positive");
    }
    std::vector<TomographyRecord> records;
    records.reserve(settings.size());
    for (std::size_t i = 0; i < settings.size(); ++i) {
        Engine eng = make_engine(sub_seed(seed, i));
        const double mean = exposure * born_probability(rho, settings[i]);
        const double count = static_cast<double>(poisson(mean, eng));
        records.push_back({settings[i], count, exposure});
    }
    return records;
}

double correlation(const DensityMatrix& rho, double theta_a_deg, double theta_b_deg) {
    const auto prob = [&](double a, double b) {
        return born_probability(rho, {linear_ket(a), linear_ket(b), "", ""});
    };
    const double p_pp = prob(theta_a_deg, theta_b_deg);
    const double p_pm = prob(theta_a_deg, theta_b_deg + 90.0);
    const double p_mp = prob(theta_a_deg + 90.0, theta_b_deg);
    const double p_mm = prob(theta_a_deg + 90.0, theta_b_deg + 90.0);
    const double total = p_pp + p_pm + p_mp + p_mm;
    if (total < 1e-12) {
        throw UndefinedCorrelation();
    }
    return (p_pp - p_pm - p_mp + p_mm) / total;
}

double chsh_fixed(const DensityMatrix& rho, const AngleSet& angles) {
    const double a1 = angles.alice_angles[0];
    const double a2 = angles.alice_angles[1];
    const double b1 = angles.bob_angles[0];
    const double b2 = angles.bob_angles[1];
    return std::abs(correlation(rho, a1, b1) - correlation(rho, a1, b2)
                    + correlation(rho, a2, b1) + correlation(rho, a2, b2));
}

Eigen::Matrix3d correlation_matrix(const DensityMatrix& rho) {
    const Eigen::Matrix2cd paulis[3] = {sigma_x(), sigma_y(), sigma_z()};
    Eigen::Matrix3d t;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            t(i, j) = (rho.matrix() * kron(paulis[i], paulis[j])).trace().real();
        }
    }
    return t;
}

double chsh_max(const DensityMatrix& rho) {
    const Eigen::Matrix3d t = correlation_matrix(rho);
    const Eigen::Matrix3d m = t.transpose() * t;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(m);
    const Eigen::Vector3d eigs = solver.eigenvalues();  // ascending
    return 2.0 * std::sqrt(std::max(0.0, eigs(2) + eigs(1)));
}

}  // namespace biphoton
