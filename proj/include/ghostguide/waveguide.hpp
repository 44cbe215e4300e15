#pragma once

// Unperturbed two-dimensional waveguide (0, X) x R with Dirichlet walls:
// geometry, propagating mode basis, dispersion and mode speeds.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ghostguide/error.hpp"

namespace ghostguide {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

class WaveguideGeometry {
public:
    /// width X, sound speed c0, carrier angular frequency omega0 and the
    /// density rho0 (prefactor only). All must be positive and finite.
    WaveguideGeometry(double width, double sound_speed, double carrier_omega, double density = 1.0)
        : width_(width), sound_speed_(sound_speed), carrier_omega_(carrier_omega), density_(density) {
        auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
        if (!positive(width) || !positive(sound_speed) || !positive(carrier_omega) || !positive(density)) {
            throw DomainError("waveguide geometry: width, sound speed, frequency and density must be positive");
        }
    }

    /// Geometry whose width is `width_in_wavelengths` carrier wavelengths.
    static WaveguideGeometry in_wavelengths(double width_in_wavelengths, double sound_speed = 1.0,
                                            double carrier_omega = 2.0 * std::numbers::pi, double density = 1.0) {
        const double wavelength = 2.0 * std::numbers::pi * sound_speed / carrier_omega;
        return WaveguideGeometry(width_in_wavelengths * wavelength, sound_speed, carrier_omega, density);
    }

    double width() const noexcept { return width_; }
    double sound_speed() const noexcept { return sound_speed_; }
    double carrier_omega() const noexcept { return carrier_omega_; }
    double density() const noexcept { return density_; }
    double wavenumber() const noexcept { return carrier_omega_ / sound_speed_; }
    double wavelength() const noexcept { return 2.0 * std::numbers::pi / wavenumber(); }

    /// k0 X / pi, the (real) number of half wavelengths across the guide.
    double mode_parameter() const noexcept { return wavenumber() * width_ / std::numbers::pi; }

private:
    double width_;
    double sound_speed_;
    double carrier_omega_;
    double density_;
};

/// floor(k0 X / pi), minus one when k0 X / pi is an exact integer (that mode
/// sits at cutoff with zero wavenumber).
inline int num_propagating_modes(const WaveguideGeometry& geometry) {
    const double m = geometry.mode_parameter();
    if (!(m >= 1.0)) {
        throw NoPropagatingModes("k0 X / pi = " + std::to_string(m) + " < 1: no propagating mode");
    }
    auto n = static_cast<int>(std::floor(m));
    if (static_cast<double>(n) == m) {
        --n;
    }
    if (n < 1) {
        throw NoPropagatingModes("k0 X / pi = 1: the only mode is at cutoff");
    }
    return n;
}

/// phi_j(x) = sqrt(2/X) sin(pi j x / X), j >= 1.
inline double mode_shape(int j, double x, const WaveguideGeometry& geometry) {
    const double X = geometry.width();
    if (j < 1) {
        throw DomainError("mode index must be >= 1");
    }
    if (!(x >= 0.0 && x <= X)) {
        throw DomainError("cross-range " + std::to_string(x) + " outside [0, X]");
    }
    return std::sqrt(2.0 / X) * std::sin(std::numbers::pi * j * x / X);
}

/// Propagating modes at the carrier frequency.
///
/// beta(j-1) is the wavenumber of mode j, decreasing in j; beta_prime(j-1) =
/// k0 / (c0 beta_j) is its slowness, so mode 1 is the fastest.
class ModeBasis {
public:
    ModeBasis(const WaveguideGeometry& geometry, Vector beta)
        : geometry_(geometry), beta_(std::move(beta)) {
        const double k0 = geometry_.wavenumber();
        const double c0 = geometry_.sound_speed();
        beta_prime_ = beta_.unaryExpr([&](double b) { return k0 / (c0 * b); });
    }

    int size() const noexcept { return static_cast<int>(beta_.size()); }
    const WaveguideGeometry& geometry() const noexcept { return geometry_; }
    const Vector& beta() const noexcept { return beta_; }
    const Vector& beta_prime() const noexcept { return beta_prime_; }

    double shape(int j, double x) const { return mode_shape(j, x, geometry_); }

    /// [phi_1(x), ..., phi_N(x)].
    Vector shapes(double x) const {
        const double X = geometry_.width();
        if (!(x >= 0.0 && x <= X)) {
            throw DomainError("cross-range " + std::to_string(x) + " outside [0, X]");
        }
        Vector v(size());
        const double amp = std::sqrt(2.0 / X);
        for (int j = 1; j <= size(); ++j) {
            v(j - 1) = amp * std::sin(std::numbers::pi * j * x / X);
        }
        return v;
    }

    /// N x M matrix whose column m holds shapes(xs[m]).
    Matrix shapes(const std::vector<double>& xs) const {
        Matrix m(size(), static_cast<Eigen::Index>(xs.size()));
        for (std::size_t i = 0; i < xs.size(); ++i) {
            m.col(static_cast<Eigen::Index>(i)) = shapes(xs[i]);
        }
        return m;
    }

private:
    WaveguideGeometry geometry_;
    Vector beta_;
    Vector beta_prime_;
};

/// beta_j = sqrt(k0^2 - (pi j / X)^2) for the propagating modes. Modes with
/// beta_j < cutoff_fraction * k0 are dropped as well.
inline ModeBasis build_mode_basis(const WaveguideGeometry& geometry, double cutoff_fraction = 1e-6) {
    const int n = num_propagating_modes(geometry);
    const double k0 = geometry.wavenumber();
    const double X = geometry.width();
    std::vector<double> betas;
    betas.reserve(static_cast<std::size_t>(n));
    for (int j = 1; j <= n; ++j) {
        const double t = std::numbers::pi * j / X;
        const double b = std::sqrt((k0 - t) * (k0 + t));
        if (!(b > cutoff_fraction * k0)) {
            break;
        }
        betas.push_back(b);
    }
    if (betas.empty()) {
        throw NoPropagatingModes("every mode lies below the grazing cutoff");
    }
    return ModeBasis(geometry, Eigen::Map<const Vector>(betas.data(), static_cast<Eigen::Index>(betas.size())));
}

/// Scaled ranges: source to target L, target to detector calL, integration
/// window T and the source spectrum norm ||F||^2.
struct ScaledRanges {
    double L = 1.0;
    double calL = 100.0;
    double T = 0.0;
    double spectrum_norm = 1.0;

    void validate() const {
        if (!(L > 0.0) || !(calL > 0.0)) {
            throw DomainError("ranges L and calL must be positive");
        }
        if (!(T >= 0.0)) {
            throw DomainError("integration window must be non-negative");
        }
        if (!(spectrum_norm > 0.0)) {
            throw DomainError("spectrum norm must be positive");
        }
    }

    std::vector<std::string> warnings() const {
        std::vector<std::string> w;
        if (calL < 10.0 * L) {
            w.emplace_back("target-to-detector range is not much larger than the source-to-target range");
        }
        return w;
    }
};

}  // namespace ghostguide
