#pragma once

// Imaging functions behind a randomly perturbed section: the general
// expression at any source-to-target range L, its weak, strong and
// equipartition limits, the incident-flux contribution and the image formed
// with the random guide itself as reference.
//
// The limit forms are written out independently of the general expression
// so that each can serve as an oracle for the other.

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "ghostguide/coupling.hpp"
#include "ghostguide/homogeneous.hpp"
#include "ghostguide/reflectivity.hpp"
#include "ghostguide/scattering.hpp"
#include "ghostguide/waveguide.hpp"

namespace ghostguide {

struct RandomImageSpec {
    ModeBasis basis;
    ScaledRanges ranges;
    CouplingMatrices coupling;
    ScatteringModel scattering;
    Reflectivity reflectivity;
};

class RandomImager {
public:
    explicit RandomImager(RandomImageSpec spec)
        : spec_(std::move(spec)), target_(target_moments(spec_.reflectivity, spec_.basis)),
          shadow_(ShadowKernel::unweighted(spec_.basis, target_)) {
        spec_.ranges.validate();
        const int n = spec_.basis.size();
        if (spec_.coupling.S.rows() != n || spec_.coupling.D.rows() != n || spec_.scattering.size() != n) {
            throw DimensionMismatch("coupling matrices or scattering model do not match the mode basis");
        }
        const auto& g = spec_.basis.geometry();
        const double rc = g.density() * g.sound_speed();
        base_ = g.wavenumber() * g.wavenumber() * spec_.ranges.spectrum_norm / (rc * rc);
        const double L = spec_.ranges.L;
        damping_ = coherent_damping(spec_.scattering, L);
        transfer_ = incoherent_transfer(spec_.scattering, L);
    }

    const RandomImageSpec& spec() const noexcept { return spec_; }
    const Matrix& incoherent() const noexcept { return transfer_; }

    /// General expression: coherent double sums damped by exp(kappa L) and the
    /// incoherent triple sum weighted by int W dt, against the unweighted
    /// shadow bracket.
    double general(double x) const {
        const ModeBasis& b = spec_.basis;
        const Matrix& S = spec_.coupling.S;
        const Vector& beta = b.beta();
        const Vector phi = b.shapes(x);
        const Vector phi2 = phi.cwiseAbs2();
        const Vector sp = S.diagonal().cwiseProduct(phi);
        const Vector bsp = beta.cwiseProduct(sp);

        // two coherent double sums; the kernel is Hermitian and the shadow
        // moments symmetric, so only the real part survives
        Matrix f = (sp * bsp.transpose() + bsp * sp.transpose()).cwiseProduct(damping_.real());

        Matrix s2_off = S.cwiseAbs2();
        s2_off.diagonal().setZero();
        const Vector off = s2_off.transpose() * beta.cwiseProduct(phi2);
        for (int a = 0; a < b.size(); ++a) {
            f(a, a) += 2.0 * damping_(a, a).real() * off(a);
        }

        // u_j' = sum_l S_j'l^2 beta_l phi_l^2
        const Vector u = S.cwiseAbs2() * beta.cwiseProduct(phi2);
        const Vector inc = transfer_ * beta.cwiseProduct(u);
        f.diagonal() += 2.0 * inc.cwiseQuotient(beta);

        return prefactor32() * f.cwiseProduct(shadow_.moments()).sum();
    }

    /// Weak scattering between source and target (|kappa| L << 1).
    double weak(double x) const {
        ModalKernel k{source_bracket_kernel(spec_.basis, spec_.coupling.S, x)};
        return prefactor32() * bilinear_image_integral(k, shadow_);
    }

    /// Strong scattering (coherent part negligible) with transfer matrix w.
    double strong(double x, const Matrix& w) const {
        const ModeBasis& b = spec_.basis;
        const int n = b.size();
        if (w.rows() != n || w.cols() != n) {
            throw DimensionMismatch("transfer matrix must be N x N");
        }
        const Matrix& S = spec_.coupling.S;
        const Vector& beta = b.beta();
        const Vector phi = b.shapes(x);
        const Matrix& G = shadow_.moments();
        double total = 0.0;
        for (int j = 0; j < n; ++j) {
            double front = 0.0;
            for (int jp = 0; jp < n; ++jp) {
                for (int l = 0; l < n; ++l) {
                    front += S(jp, l) * S(jp, l) * phi(l) * phi(l) * beta(jp) * beta(l) / beta(j) * w(j, jp);
                }
            }
            total += front * G(j, j);
        }
        return 2.0 * prefactor32() * total;
    }

    /// Strong scattering with the transfer supplied by the model at range L.
    double strong(double x) const { return strong(x, transfer_); }

    /// L beyond the equipartition distance (transfer = 1/N):
    ///   -(k0^2 ||F||^2 C_D / (16 N rho0^2 c0^2)) c(x) int int r r Phi_{-1}^2,
    /// c(x) = sum_{j',l} S_j'l^2 beta_j' beta_l phi_l(x)^2 (= Phi_2(x,x) for S = I).
    double equipartition(double x) const {
        const ModeBasis& b = spec_.basis;
        const Vector& beta = b.beta();
        const Vector phi = b.shapes(x);
        const double c = beta.dot(spec_.coupling.S.cwiseAbs2() * beta.cwiseProduct(phi.cwiseAbs2()));
        const Matrix m = beta.cwiseInverse().asDiagonal() * target_.R;
        const double phi_m1_sq = (m * m).trace();
        return -2.0 * prefactor32() * c * phi_m1_sq / b.size();
    }

    /// Random guide used as its own reference, L beyond equipartition:
    ///   -(k0^2 ||F||^2 C_D C_S / (16 rho0^2 c0^2)) int int r r Phi_{-1}(x,y) Phi_0(x,y') Phi_{-1}(y,y').
    double random_reference(double x) const {
        const ModeBasis& b = spec_.basis;
        const Vector phi = b.shapes(x);
        const Vector inv_beta = b.beta().cwiseInverse();
        const Matrix t = target_.R * inv_beta.asDiagonal() * target_.R;
        const double c = base_ * spec_.coupling.C_D * spec_.coupling.C_S / 16.0;
        return -c * inv_beta.cwiseProduct(phi).dot(t * phi);
    }

    std::vector<std::string> warnings(const std::string& regime) const {
        std::vector<std::string> w;
        const auto& m = spec_.scattering;
        const double L = spec_.ranges.L;
        if (m.reducible) {
            w.emplace_back("mode coupling graph is reducible: transfer tends to block-uniform, not 1/N");
        }
        if (regime == "weak" && max_coherent_rate(m) * L > 0.3) {
            w.emplace_back("max |kappa_jj| L = " + std::to_string(max_coherent_rate(m) * L) +
                           " > 0.3: outside the weak-scattering range");
        }
        if ((regime == "random-reference" || regime == "equipartition") && !(L > m.L_eq)) {
            w.emplace_back("L does not exceed the equipartition distance");
        }
        const auto& bp = spec_.basis.beta_prime();
        if (spec_.ranges.T < bp(bp.size() - 1) * spec_.ranges.calL) {
            w.emplace_back("integration window shorter than the slowest arrival; using the long-window formula");
        }
        return w;
    }

private:
    double prefactor32() const { return base_ * spec_.coupling.C_D / 32.0; }

    RandomImageSpec spec_;
    TargetMoments target_;
    ShadowKernel shadow_;
    double base_ = 0.0;  ///< k0^2 ||F||^2 / (rho0 c0)^2
    ComplexMatrix damping_;
    Matrix transfer_;
};

/// Contribution of the incident flux to the image, independent of the target.
class IncidentFlux {
public:
    IncidentFlux(ModeBasis basis, CouplingMatrices coupling, const ScatteringModel& model, ScaledRanges ranges)
        : basis_(std::move(basis)), coupling_(std::move(coupling)) {
        ranges.validate();
        const auto& g = basis_.geometry();
        const double rc = g.density() * g.sound_speed();
        const double k0 = g.wavenumber();
        prefactor_ = coupling_.C_D * ranges.spectrum_norm / (8.0 * rc * rc * k0 * k0);
        const int n = basis_.size();
        decay_.resize(n);
        for (int j = 0; j < n; ++j) {
            decay_(j) = std::exp(model.kappa(j, j).real() * ranges.L);
        }
        transfer_ = incoherent_transfer(model, ranges.L);
    }

    double operator()(double x) const {
        const int n = basis_.size();
        const Matrix& S = coupling_.S;
        const Vector& beta = basis_.beta();
        const Vector phi = basis_.shapes(x);
        double diag = 0.0;
        double off = 0.0;
        double inc = 0.0;
        for (int j = 0; j < n; ++j) {
            diag += S(j, j) * S(j, j) * phi(j) * phi(j) * beta(j) * beta(j) * decay_(j);
            for (int l = 0; l < n; ++l) {
                if (l != j) {
                    off += S(j, l) * S(j, l) * phi(l) * phi(l) * beta(j) * beta(l) * decay_(j);
                }
            }
        }
        for (int j = 0; j < n; ++j) {
            for (int jp = 0; jp < n; ++jp) {
                double s = 0.0;
                for (int l = 0; l < n; ++l) {
                    s += S(jp, l) * S(jp, l) * phi(l) * phi(l) * beta(l);
                }
                inc += s * beta(jp) * transfer_(j, jp);
            }
        }
        return prefactor_ * (diag + off + inc);
    }

private:
    ModeBasis basis_;
    CouplingMatrices coupling_;
    double prefactor_ = 0.0;
    Vector decay_;
    Matrix transfer_;
};

}  // namespace ghostguide
