#pragma once

// Imaging function with the unperturbed waveguide on both sides of the
// target: the finite-window form with Heaviside arrival gating, its
// long-window limit and the ideal full-aperture form.

#include <cmath>
#include <vector>

#include "ghostguide/coupling.hpp"
#include "ghostguide/reflectivity.hpp"
#include "ghostguide/waveguide.hpp"

namespace ghostguide {

/// F_ab(x) of the source-side bracket shared by the unperturbed long-window
/// image and the weak-scattering image:
///   (beta_a + beta_b) S_aa S_bb phi_a phi_b + 2 delta_ab sum_{j != a} beta_j S_ja^2 phi_j^2.
inline Matrix source_bracket_kernel(const ModeBasis& basis, const Matrix& S, double x) {
    const Vector phi = basis.shapes(x);
    const Vector sp = S.diagonal().cwiseProduct(phi);
    const Vector bsp = basis.beta().cwiseProduct(sp);
    Matrix k = sp * bsp.transpose() + bsp * sp.transpose();
    Matrix s2 = S.cwiseAbs2();
    s2.diagonal().setZero();
    k.diagonal() += 2.0 * s2.transpose() * basis.beta().cwiseProduct(phi.cwiseAbs2());
    return k;
}

struct HomogeneousImageSpec {
    ModeBasis basis;
    ScaledRanges ranges;
    CouplingMatrices coupling;
    Reflectivity reflectivity;
};

class HomogeneousImager {
public:
    explicit HomogeneousImager(HomogeneousImageSpec spec)
        : spec_(std::move(spec)), target_(target_moments(spec_.reflectivity, spec_.basis)),
          shadow_(spec_.basis, target_, spec_.coupling.D.diagonal(), spec_.coupling.D.diagonal()) {
        spec_.ranges.validate();
        const int n = spec_.basis.size();
        if (spec_.coupling.S.rows() != n || spec_.coupling.D.rows() != n) {
            throw DimensionMismatch("coupling matrices do not match the mode basis");
        }
        const auto& g = spec_.basis.geometry();
        const double rc = g.density() * g.sound_speed();
        prefactor_ = g.wavenumber() * g.wavenumber() * spec_.ranges.spectrum_norm / (32.0 * rc * rc);
        prepare_gated_sums();
    }

    const HomogeneousImageSpec& spec() const noexcept { return spec_; }
    const TargetMoments& target() const noexcept { return target_; }

    /// Finite integration window: every detector mode n contributes only when
    /// its arrival time fits in the window, H(0) = 1.
    double general(double x) const {
        const ModeBasis& b = spec_.basis;
        const Vector phi = b.shapes(x);
        const Vector sp = spec_.coupling.S.diagonal().cwiseProduct(phi);
        // c_jl = (beta_j + beta_l) s_j s_l phi_j phi_l
        const Vector bsp = b.beta().cwiseProduct(sp);
        const Matrix c = bsp * sp.transpose() + sp * bsp.transpose();
        const double first = c.cwiseProduct(gated_first_).sum();
        const double second = 2.0 * phi.cwiseAbs2().dot(gated_second_);
        return prefactor_ * (first + second);
    }

    /// Window longer than the slowest arrival: all gates open.
    double long_time(double x) const {
        const ModalKernel k{source_bracket_kernel(spec_.basis, spec_.coupling.S, x)};
        return prefactor_ * bilinear_image_integral(k, shadow_);
    }

    ModalKernel long_time_kernel(double x) const {
        return ModalKernel{prefactor_ * source_bracket_kernel(spec_.basis, spec_.coupling.S, x)};
    }

    /// Ideal full-aperture form, -(k0^2 ||F||^2 / (16 rho0^2 c0^2))
    /// int int r r Phi_0(x,y) Phi_1(x,y') Phi_{-1}(y,y'); ignores S and D.
    double ideal(double x) const {
        const ModeBasis& b = spec_.basis;
        const Vector phi = b.shapes(x);
        const Matrix& R = target_.R;
        const Matrix t = R * b.beta().cwiseInverse().asDiagonal() * R;
        return -2.0 * prefactor_ * phi.dot(t * b.beta().cwiseProduct(phi));
    }

private:
    void prepare_gated_sums() {
        const ModeBasis& b = spec_.basis;
        const int n = b.size();
        const double T = spec_.ranges.T;
        const double L = spec_.ranges.L;
        const double calL = spec_.ranges.calL;
        const Vector& beta = b.beta();
        const Vector& bp = b.beta_prime();
        const Vector d = spec_.coupling.D.diagonal();
        const Matrix& S = spec_.coupling.S;
        const Matrix& R = target_.R;
        const Matrix t = R * beta.cwiseInverse().asDiagonal() * R;

        auto gate = [](double arg) { return arg >= 0.0 ? 1.0 : 0.0; };

        Vector hd(n);
        for (int m = 0; m < n; ++m) {
            hd(m) = gate(T - bp(m) * calL) * d(m);
        }
        // same rounding as the shadow kernel's cross term
        const Matrix a = R * beta.cwiseInverse().cwiseProduct(hd).asDiagonal() * R;
        gated_first_ = a - 2.0 * t * hd.asDiagonal();

        // Q_j = beta_j sum_{j' != j} S_jj'^2 sum_n H_n(j, j') d_n [R_j'n^2 / beta_n - 2 delta_nj' T_j'j']
        gated_second_ = Vector::Zero(n);
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int jp = 0; jp < n; ++jp) {
                if (jp == j) {
                    continue;
                }
                const double shift = (bp(j) - bp(jp)) * L;
                double inner = 0.0;
                for (int m = 0; m < n; ++m) {
                    const double h = gate(T - bp(m) * calL + shift);
                    if (h == 0.0) {
                        continue;
                    }
                    inner += d(m) * R(jp, m) * R(jp, m) / beta(m);
                    if (m == jp) {
                        inner -= 2.0 * d(m) * t(jp, jp);
                    }
                }
                acc += S(j, jp) * S(j, jp) * inner;
            }
            gated_second_(j) = beta(j) * acc;
        }
    }

    HomogeneousImageSpec spec_;
    TargetMoments target_;
    ShadowKernel shadow_;
    double prefactor_ = 0.0;
    Matrix gated_first_;
    Vector gated_second_;
};

inline double image_homogeneous_general(const HomogeneousImager& imager, double x) { return imager.general(x); }
inline double image_homogeneous_longT(const HomogeneousImager& imager, double x) { return imager.long_time(x); }
inline double image_homogeneous_ideal(const HomogeneousImager& imager, double x) { return imager.ideal(x); }

}  // namespace ghostguide
