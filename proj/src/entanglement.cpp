#include "biphoton/entanglement.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <numbers>

namespace biphoton {

namespace {

// Hermitian PSD square root. Eigenvalues below a relative floor are treated
// as exact zeros so rounding noise in rank-deficient states cannot leak into
// sqrt() and get amplified.
Eigen::Matrix4cd psd_sqrt(const Eigen::Matrix4cd& m) {
    const EigResult eig = eig_hermitian(m);
    const double floor = 1e-13 * std::max(eig.values[0], 0.0);
    Eigen::Vector4d roots;
    for (int i = 0; i < 4; ++i) {
        const double v = eig.values[i];
        roots(i) = v > floor ? std::sqrt(v) : 0.0;
    }
    return eig.vectors * roots.asDiagonal() * eig.vectors.adjoint();
}

}  // namespace

double concurrence(const DensityMatrix& rho) {
    const Eigen::Matrix4cd root = psd_sqrt(rho.matrix());
    const Eigen::Matrix4cd yy = kron(sigma_y(), sigma_y());
    const Eigen::Matrix4cd k = root * yy * root.conjugate();
    Eigen::JacobiSVD<Eigen::Matrix4cd> svd(k);
    const Eigen::Vector4d lambda = svd.singularValues();  // descending
    const double c = lambda(0) - lambda(1) - lambda(2) - lambda(3);
    return c > 0.0 ? c : 0.0;
}

double von_neumann_entropy(const DensityMatrix& rho) {
    const EigResult eig = eig_hermitian(rho.matrix());
    double s = 0.0;
    for (double v : eig.values) {
        if (v > 0.0) {
            s -= v * std::log(v);
        }
    }
    return s;
}

EntanglementReport report(const DensityMatrix& rho) {
    return report(rho, default_chsh_angles());
}

EntanglementReport report(const DensityMatrix& rho, const AngleSet& angles) {
    EntanglementReport r;
    r.concurrence = concurrence(rho);
    r.entropy_nats = von_neumann_entropy(rho);
    r.entropy_bits = r.entropy_nats / std::numbers::ln2;
    r.eigenvalues = eig_hermitian(rho.matrix()).values;
    r.s_fixed = chsh_fixed(rho, angles);
    r.s_max = chsh_max(rho);
    r.violates_chsh = r.s_fixed > 2.0;
    return r;
}

}  // namespace biphoton
