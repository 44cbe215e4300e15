#pragma once

// Target reflectivity and the bilinear integration engine shared by all the
// imaging functions.
//
// Every front kernel in the imaging formulas is a finite mode sum
//   K(x; y, y') = sum_ab F_ab(x) phi_a(y) phi_b(y'),
// so the double integral against the shadow bracket
//   B(y, y') = -2 r(y) int r(y'') Phi_{W0}(y', y'') Phi_{-1}(y, y'') dy''
//              + Phi_{V,-1}(y, y') r(y) r(y')
// reduces to sum_ab F_ab(x) G_ab with G built from the target moments
// R_ab = int r phi_a phi_b. Point targets enter R exactly.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "ghostguide/phi_sums.hpp"
#include "ghostguide/quadrature.hpp"
#include "ghostguide/waveguide.hpp"

namespace ghostguide {

struct PointTarget {
    double position = 0.0;
    double strength = 0.0;
};

/// Smooth reflectivity r(y) supported on [lo, hi].
struct SmoothProfile {
    double lo = 0.0;
    double hi = 0.0;
    std::function<double(double)> r;
    /// Uniform samples (endpoints included) when built by sampled().
    std::vector<double> samples;

    double operator()(double y) const { return (y < lo || y > hi) ? 0.0 : r(y); }

    /// Piecewise-linear interpolant of uniform samples over [lo, hi].
    static SmoothProfile sampled(double lo, double hi, std::vector<double> values) {
        if (values.size() < 2) {
            throw DomainError("sampled reflectivity needs at least two samples");
        }
        SmoothProfile p;
        p.lo = lo;
        p.hi = hi;
        p.samples = std::move(values);
        const std::vector<double>& v = p.samples;
        const double h = (hi - lo) / static_cast<double>(v.size() - 1);
        p.r = [v, lo, h](double y) {
            const double s = (y - lo) / h;
            const auto i = std::min(static_cast<std::size_t>(std::max(0.0, std::floor(s))), v.size() - 2);
            const double f = s - static_cast<double>(i);
            return (1.0 - f) * v[i] + f * v[i + 1];
        };
        return p;
    }
};

struct Reflectivity {
    std::vector<PointTarget> points;
    std::optional<SmoothProfile> profile;

    bool empty() const noexcept { return points.empty() && !profile; }

    void validate(double width) const {
        if (empty()) {
            throw EmptyTarget("reflectivity has no point target and no profile");
        }
        for (const auto& p : points) {
            if (!(p.position > 0.0 && p.position < width)) {
                throw DomainError("point target must lie strictly inside (0, X)");
            }
        }
        if (profile && !(profile->lo > 0.0 && profile->lo < profile->hi && profile->hi < width)) {
            throw DomainError("reflectivity profile support must lie strictly inside (0, X)");
        }
    }
};

/// R_ab = int r(y) phi_a(y) phi_b(y) dy.
struct TargetMoments {
    Matrix R;
    bool quadrature_converged = true;
};

inline TargetMoments target_moments(const Reflectivity& refl, const ModeBasis& basis,
                                    QuadratureOptions opt = {}) {
    refl.validate(basis.geometry().width());
    const int n = basis.size();
    TargetMoments tm;
    tm.R = Matrix::Zero(n, n);
    for (const auto& p : refl.points) {
        const Vector s = basis.shapes(p.position);
        tm.R.noalias() += p.strength * s * s.transpose();
    }
    if (!refl.profile) {
        return tm;
    }

    const SmoothProfile& prof = *refl.profile;
    opt.wavelength = basis.geometry().wavelength();
    auto integrate = [&](int panels) {
        const QuadratureRule rule = composite_gauss_legendre(prof.lo, prof.hi, panels, opt.order);
        Matrix acc = Matrix::Zero(n, n);
        for (std::size_t i = 0; i < rule.size(); ++i) {
            const Vector s = basis.shapes(rule.nodes[i]);
            acc.noalias() += (rule.weights[i] * prof(rule.nodes[i])) * s * s.transpose();
        }
        return acc;
    };
    const double nodes_needed = opt.nodes_per_wavelength * (prof.hi - prof.lo) / opt.wavelength;
    int panels = std::max(1, static_cast<int>(std::ceil(nodes_needed / opt.order)));
    Matrix coarse = integrate(panels);
    while (true) {
        Matrix fine = integrate(2 * panels);
        const double err = (fine - coarse).norm();
        const bool ok = err <= std::max(opt.rel_tol * fine.norm(), opt.abs_tol);
        if (ok || 2 * panels >= opt.max_panels) {
            tm.R += fine;
            tm.quadrature_converged = ok;
            return tm;
        }
        panels *= 2;
        coarse = std::move(fine);
    }
}

/// Front kernel K(y, y') = sum_ab coeff_ab phi_a(y) phi_b(y').
struct ModalKernel {
    Matrix coeff;

    double operator()(const ModeBasis& basis, double y, double yp) const {
        return basis.shapes(y).dot(coeff * basis.shapes(yp));
    }
};

/// Shadow bracket B(y, y') with mode weights W on the inner Phi_0 and V on
/// the cross Phi_{-1}: W = V = diag(D) in the unperturbed guide, W = V = 1
/// behind the random section.
class ShadowKernel {
public:
    ShadowKernel(const ModeBasis& basis, const TargetMoments& target, Vector inner_weights, Vector cross_weights)
        : basis_(&basis), inner_(std::move(inner_weights)), cross_(std::move(cross_weights)) {
        const int n = basis.size();
        if (inner_.size() != n || cross_.size() != n || target.R.rows() != n) {
            throw DimensionMismatch("shadow kernel weights do not match the mode basis");
        }
        const Vector inv_beta = basis.beta().cwiseInverse();
        const Matrix& R = target.R;
        const Matrix t = R * inv_beta.asDiagonal() * R;
        const Matrix tv = R * inv_beta.cwiseProduct(cross_).asDiagonal() * R;
        moments_ = -2.0 * t * inner_.asDiagonal();
        moments_ += tv;
    }

    static ShadowKernel unweighted(const ModeBasis& basis, const TargetMoments& target) {
        const Vector ones = Vector::Ones(basis.size());
        return ShadowKernel(basis, target, ones, ones);
    }

    /// G_ab such that int int K(y, y') B(y, y') dy dy' = sum_ab F_ab G_ab.
    const Matrix& moments() const noexcept { return moments_; }

    /// Pointwise B(y, y') for a smooth reflectivity; the y'' integral uses
    /// smooth_quadrature over the profile support.
    double evaluate(double y, double yp, const SmoothProfile& r) const {
        const ModeBasis& b = *basis_;
        const Vector inv_beta = b.beta().cwiseInverse();
        const Vector sy = b.shapes(y);
        const Vector syp = b.shapes(yp);
        const Vector c0 = inner_.cwiseProduct(syp);
        const Vector c1 = inv_beta.cwiseProduct(sy);
        QuadratureOptions opt;
        opt.wavelength = b.geometry().wavelength();
        opt.rel_tol = 1e-11;
        const auto inner = smooth_quadrature(
            [&](double ypp) {
                const Vector s = b.shapes(ypp);
                return r(ypp) * c0.dot(s) * c1.dot(s);
            },
            r.lo, r.hi, opt);
        const double cross = (cross_.cwiseProduct(inv_beta).array() * sy.array() * syp.array()).sum();
        return -2.0 * r(y) * inner.value + cross * r(y) * r(yp);
    }

private:
    const ModeBasis* basis_;
    Vector inner_;
    Vector cross_;
    Matrix moments_;
};

/// int int K(y, y') B(y, y') dy dy' over (0, X)^2.
inline double bilinear_image_integral(const ModalKernel& front, const ShadowKernel& shadow) {
    return front.coeff.cwiseProduct(shadow.moments()).sum();
}

}  // namespace ghostguide
