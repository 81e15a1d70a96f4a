#include "biphoton/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace biphoton {

namespace {

constexpr double kEigHermitianGate = 1e-8;

double max_abs_asymmetry(const Eigen::Matrix4cd& m) {
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            worst = std::max(worst, std::abs(m(i, j) - std::conj(m(j, i))));
        }
    }
    return worst;
}

}  // namespace

Ket2 Ket2::normalized(cd h, cd v) {
    return normalized(Eigen::Vector2cd(h, v));
}

Ket2 Ket2::normalized(const Eigen::Vector2cd& amps) {
    const double n = amps.norm();
    if (n < 1e-300) {
        throw std::invalid_argument("cannot normalize the zero ket");
    }
    return Ket2(amps / n);
}

Ket2 Ket2::orthogonal() const {
    return Ket2(Eigen::Vector2cd(-std::conj(amps_(1)), std::conj(amps_(0))));
}

Ket4 Ket4::normalized(const Eigen::Vector4cd& amps) {
    const double n = amps.norm();
    if (n < 1e-300) {
        throw std::invalid_argument("cannot normalize the zero ket");
    }
    return Ket4(amps / n);
}

Ket2 ket_h() { return Ket2::normalized(1.0, 0.0); }
Ket2 ket_v() { return Ket2::normalized(0.0, 1.0); }
Ket2 ket_d() { return Ket2::normalized(1.0, 1.0); }
Ket2 ket_r() { return Ket2::normalized(1.0, cd(0.0, 1.0)); }
Ket2 ket_l() { return Ket2::normalized(1.0, cd(0.0, -1.0)); }

Ket2 linear_ket(double theta_deg) {
    const double theta = theta_deg * std::numbers::pi / 180.0;
    return Ket2::normalized(std::cos(theta), std::sin(theta));
}

Ket4 bell_phi_plus() {
    Eigen::Vector4cd amps;
    amps << 1.0, 0.0, 0.0, 1.0;
    return Ket4::normalized(amps);
}

Ket4 tensor(const Ket2& a, const Ket2& b) {
    Eigen::Vector4cd amps;
    amps << a.h() * b.h(), a.h() * b.v(), a.v() * b.h(), a.v() * b.v();
    return Ket4::normalized(amps);
}

Eigen::Matrix2cd sigma_x() {
    Eigen::Matrix2cd m;
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

Eigen::Matrix2cd sigma_y() {
    Eigen::Matrix2cd m;
    m << cd(0, 0), cd(0, -1), cd(0, 1), cd(0, 0);
    return m;
}

Eigen::Matrix2cd sigma_z() {
    Eigen::Matrix2cd m;
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

Eigen::Matrix4cd kron(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
    Eigen::Matrix4cd out;
    out.block<2, 2>(0, 0) = a(0, 0) * b;
    out.block<2, 2>(0, 2) = a(0, 1) * b;
    out.block<2, 2>(2, 0) = a(1, 0) * b;
    out.block<2, 2>(2, 2) = a(1, 1) * b;
    return out;
}

DensityMatrix DensityMatrix::pure(const Ket4& psi) {
    const Eigen::Vector4cd& v = psi.amplitudes();
    return DensityMatrix(v * v.adjoint());
}

DensityMatrix validate(const Eigen::Matrix4cd& raw) {
    const double asym = max_abs_asymmetry(raw);
    if (asym > kHermitianTol) {
        throw std::invalid_argument("matrix is not Hermitian (max asymmetry "
                                    + std::to_string(asym) + ")");
    }
    const cd tr = raw.trace();
    if (std::abs(tr - cd(1.0, 0.0)) > kTraceTol) {
        throw std::invalid_argument("matrix trace is not 1 (trace "
                                    + std::to_string(tr.real()) + " + "
                                    + std::to_string(tr.imag()) + "i)");
    }
    const EigResult eig = eig_hermitian(raw);
    const double min_eig = eig.values.back();
    if (min_eig < kPsdTol) {
        throw IllegitimateDensityMatrix(min_eig);
    }
    return DensityMatrix(raw);
}

EigResult eig_hermitian(const Eigen::Matrix4cd& m) {
    const double asym = max_abs_asymmetry(m);
    if (asym > kEigHermitianGate) {
        throw std::invalid_argument("eig_hermitian: input is not Hermitian (max asymmetry "
                                    + std::to_string(asym) + ")");
    }
    const Eigen::Matrix4cd sym = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("eig_hermitian: eigen-decomposition failed");
    }

    // Eigen returns ascending order; flip to descending.
    EigResult out;
    for (int i = 0; i < 4; ++i) {
        out.values[static_cast<std::size_t>(i)] = solver.eigenvalues()(3 - i);
        out.vectors.col(i) = solver.eigenvectors().col(3 - i);
    }
    return out;
}

}  // namespace biphoton
