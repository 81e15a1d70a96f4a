// qstate.hpp
// Complex linear algebra on the 2- and 4-dimensional polarization spaces:
// kets, density operators, tensor products and Hermitian eigen-decomposition.
//
// Basis convention, fixed everywhere: |HH>, |HV>, |VH>, |VV>, Alice index
// major. Pauli convention: sigma_z eigenbasis {|H>,|V>} with |H> -> +1.

#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <stdexcept>
#include <string>

namespace biphoton {

using cd = std::complex<double>;

// Tolerances for density-matrix validation. Well above double-precision
// noise, well below any physical signal.
inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPsdTol = -1e-9;

// Thrown by validate() when a Hermitian unit-trace matrix fails positive
// semidefiniteness. This is the signal that maximum-likelihood
// reconstruction is required.
class IllegitimateDensityMatrix : public std::runtime_error {
public:
    explicit IllegitimateDensityMatrix(double min_eig)
        : std::runtime_error("density matrix is not positive semidefinite (min eigenvalue "
                             + std::to_string(min_eig) + ")"),
          min_eigenvalue(min_eig) {}

    double min_eigenvalue;
};

// Normalized single-photon polarization ket.
class Ket2 {
public:
    // Normalizes (h, v); throws std::invalid_argument on the zero vector.
    static Ket2 normalized(cd h, cd v);
    static Ket2 normalized(const Eigen::Vector2cd& amps);

    const Eigen::Vector2cd& amplitudes() const { return amps_; }
    cd h() const { return amps_(0); }
    cd v() const { return amps_(1); }

    // The unique (up to phase) ket orthogonal to this one.
    Ket2 orthogonal() const;

private:
    explicit Ket2(Eigen::Vector2cd amps) : amps_(std::move(amps)) {}
    Eigen::Vector2cd amps_;
};

// Normalized two-photon polarization ket in the fixed basis order.
class Ket4 {
public:
    static Ket4 normalized(const Eigen::Vector4cd& amps);

    const Eigen::Vector4cd& amplitudes() const { return amps_; }
    cd operator[](int i) const { return amps_(i); }

private:
    explicit Ket4(Eigen::Vector4cd amps) : amps_(std::move(amps)) {}
    Eigen::Vector4cd amps_;
};

// Standard polarization kets. D = (H+V)/sqrt2, R = (H+iV)/sqrt2,
// L = (H-iV)/sqrt2.
Ket2 ket_h();
Ket2 ket_v();
Ket2 ket_d();
Ket2 ket_r();
Ket2 ket_l();

// Linear-polarizer ket cos(theta)|H> + sin(theta)|V>, theta in degrees.
Ket2 linear_ket(double theta_deg);

// (|HH> + |VV>)/sqrt2.
Ket4 bell_phi_plus();

// Kronecker product in the fixed basis order, Alice index major.
Ket4 tensor(const Ket2& a, const Ket2& b);

Eigen::Matrix2cd sigma_x();
Eigen::Matrix2cd sigma_y();
Eigen::Matrix2cd sigma_z();

// 2x2 (x) 2x2 Kronecker product, first factor on the Alice slot.
Eigen::Matrix4cd kron(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b);

// Checked Hermitian, unit-trace, positive-semidefinite operator on the
// two-photon polarization space. Construct via validate() or pure().
class DensityMatrix {
public:
    static DensityMatrix pure(const Ket4& psi);

    const Eigen::Matrix4cd& matrix() const { return m_; }
    cd operator()(int i, int j) const { return m_(i, j); }

    friend DensityMatrix validate(const Eigen::Matrix4cd& raw);

private:
    explicit DensityMatrix(Eigen::Matrix4cd m) : m_(std::move(m)) {}
    Eigen::Matrix4cd m_;
};

// Checks Hermiticity, unit trace and positive semidefiniteness of a raw
// matrix. Throws std::invalid_argument on Hermiticity/trace violations and
// IllegitimateDensityMatrix when the minimum eigenvalue is below kPsdTol.
DensityMatrix validate(const Eigen::Matrix4cd& raw);

struct EigResult {
    std::array<double, 4> values;  // real eigenvalues, descending
    Eigen::Matrix4cd vectors;      // orthonormal eigenvectors, column i pairs with values[i]
};

// Eigen-decomposition of a 4x4 Hermitian matrix. Throws
// std::invalid_argument if the input is non-Hermitian beyond tolerance.
EigResult eig_hermitian(const Eigen::Matrix4cd& m);

}  // namespace biphoton
