#pragma once

// Mode sums Phi_n(x, y) = sum_j w_j beta_j^n phi_j(x) phi_j(y) and their
// many-mode Bessel approximations.

#include <cmath>
#include <numbers>
#include <optional>

#include "ghostguide/waveguide.hpp"

namespace ghostguide {

/// beta_j^n for every mode, n in {-1, 0, 1, 2}.
inline Vector beta_power(const ModeBasis& basis, int n) {
    if (n < -1 || n > 2) {
        throw DomainError("Phi order must be one of -1, 0, 1, 2");
    }
    const Vector& b = basis.beta();
    switch (n) {
        case -1: return b.cwiseInverse();
        case 0: return Vector::Ones(b.size());
        case 1: return b;
        default: return b.cwiseProduct(b);
    }
}

/// Phi_n, or Phi_{W n} with diagonal weights w (diag of S or D).
class PhiKernel {
public:
    PhiKernel(const ModeBasis& basis, int order, std::optional<Vector> weights = std::nullopt)
        : basis_(&basis), order_(order), coeff_(beta_power(basis, order)) {
        if (weights) {
            if (weights->size() != basis.size()) {
                throw DimensionMismatch("Phi weights must have one entry per mode");
            }
            coeff_ = coeff_.cwiseProduct(*weights);
        }
    }

    int order() const noexcept { return order_; }

    /// Per-mode coefficients w_j beta_j^n.
    const Vector& coefficients() const noexcept { return coeff_; }

    double operator()(double x, double y) const {
        return (coeff_.array() * basis_->shapes(x).array() * basis_->shapes(y).array()).sum();
    }

private:
    const ModeBasis* basis_;
    int order_;
    Vector coeff_;
};

inline double phi_sum(int n, double x, double y, const ModeBasis& basis,
                      std::optional<Vector> weights = std::nullopt) {
    return PhiKernel(basis, n, std::move(weights))(x, y);
}

/// Many-mode approximation of Phi_n at cross-range separation d, valid away
/// from the walls:
///   n = -1:  J0(k0 d) / 2
///   n =  0:  (k0 / pi) sinc(k0 d)
///   n =  1:  (k0^2 / 2) J1(k0 |d|) / (k0 |d|)   (k0^2 / 4 at d = 0)
inline double phi_bessel_approx(int n, double separation, const WaveguideGeometry& geometry) {
    const double k0 = geometry.wavenumber();
    const double t = k0 * std::abs(separation);
    switch (n) {
        case -1:
            return 0.5 * std::cyl_bessel_j(0.0, t);
        case 0:
            return (k0 / std::numbers::pi) * (t == 0.0 ? 1.0 : std::sin(t) / t);
        case 1:
            return 0.5 * k0 * k0 * (t < 1e-8 ? 0.5 - t * t / 16.0 : std::cyl_bessel_j(1.0, t) / t);
        default:
            throw DomainError("Bessel approximation exists only for n in {-1, 0, 1}");
    }
}

}  // namespace ghostguide
