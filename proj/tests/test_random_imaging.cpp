#include <cmath>

#include <gtest/gtest.h>

#include "ghostguide/parallel.hpp"
#include "ghostguide/phi_sums.hpp"
#include "ghostguide/random_imaging.hpp"
#include "ghostguide/resolution.hpp"

using namespace ghostguide;

namespace {

ModeBasis basis_n(int n) { return build_mode_basis(WaveguideGeometry::in_wavelengths((n + 0.5) / 2.0)); }

CouplingMatrices partial_coupling(const ModeBasis& b) {
    const double X = b.geometry().width();
    return build_coupling({{0.1 * X, 0.7 * X}, GaussianKernel{0.4 * b.geometry().wavelength()}}, {{0.3 * X, X}}, b);
}

Reflectivity two_targets(const ModeBasis& b) {
    const double X = b.geometry().width();
    return {{{0.39 * X, 1.0}, {0.72 * X, 0.6}}, {}};
}

RandomImager imager(const ModeBasis& b, const CouplingMatrices& c, double rate, double L,
                    std::optional<Reflectivity> refl = std::nullopt) {
    ScaledRanges r;
    r.L = L;
    r.T = 1e9;
    return RandomImager({b, r, c, build_scattering_model(UniformRate{rate}, b), refl ? *refl : two_targets(b)});
}

void expect_close(double a, double b, double rel, double floor, const char* what) {
    EXPECT_NEAR(a, b, rel * std::max(std::abs(b), floor)) << what;
}

double prefactor(const ModeBasis& b, double cd) { return std::pow(b.geometry().wavenumber(), 2) * cd / 32.0; }

}  // namespace

TEST(RandomImage, NoScatteringEqualsWeakForm) {
    const auto b = basis_n(5);
    const auto im = imager(b, partial_coupling(b), 0.0, 3.0);
    const double X = b.geometry().width();
    for (double x : uniform_grid(0.0, X, 65)) {
        expect_close(im.general(x), im.weak(x), 1e-13, 1e-6, "general vs weak");
    }
}

TEST(RandomImage, BeyondEquipartitionEqualsClosedForm) {
    const auto b = basis_n(5);
    const double g = 0.1;
    const auto im = imager(b, partial_coupling(b), g, 50.0 / (5 * g));
    const double X = b.geometry().width();
    for (double x : uniform_grid(0.0, X, 65)) {
        expect_close(im.general(x), im.equipartition(x), 1e-8, 1e-6, "general vs equipartition");
    }
}

TEST(RandomImage, WeakFormIsDetectorConstantTimesIdealForm) {
    const auto b = basis_n(40);
    const double X = b.geometry().width();
    for (double ad : {0.1, 0.5, 1.0}) {
        const auto c = build_coupling({{0.0, X}, Incoherent{}}, {{0.0, ad * X}}, b);
        const auto im = imager(b, c, 0.0, 1.0);
        const HomogeneousImager ideal({b, ScaledRanges{}, c, two_targets(b)});
        for (double x : uniform_grid(0.01 * X, 0.99 * X, 97)) {
            EXPECT_NEAR(im.weak(x) / ideal.ideal(x), c.C_D, 1e-10 * c.C_D) << ad << " " << x;
        }
    }
}

TEST(RandomImage, StrongFormWithIdentityTransferIsIncoherentTerm) {
    const auto b = basis_n(3);
    const auto c = partial_coupling(b);
    const auto im = imager(b, c, 0.2, 1.0);
    const auto& g = b.geometry();
    const double X = g.width();
    const auto refl = two_targets(b);
    const Vector& beta = b.beta();
    // G_jj = sum_m R_jm^2 / beta_m - 2 T_jj, with T = R diag(1/beta) R
    auto R = [&](int a, int m) {
        double s = 0.0;
        for (const auto& p : refl.points) {
            s += p.strength * mode_shape(a + 1, p.position, g) * mode_shape(m + 1, p.position, g);
        }
        return s;
    };
    for (double x : {0.2 * X, 0.39 * X, 0.66 * X}) {
        double expect = 0.0;
        for (int j = 0; j < 3; ++j) {
            double u = 0.0;
            for (int l = 0; l < 3; ++l) {
                u += c.S(j, l) * c.S(j, l) * beta(l) * std::pow(mode_shape(l + 1, x, g), 2);
            }
            double gjj = 0.0;
            for (int m = 0; m < 3; ++m) {
                gjj += R(j, m) * R(m, j) / beta(m);
            }
            expect += u * (1.0 - 2.0) * gjj;
        }
        expect *= 2.0 * prefactor(b, c.C_D);
        expect_close(im.strong(x, Matrix::Identity(3, 3)), expect, 1e-12, 1e-9, "strong(I)");
    }
    EXPECT_THROW(im.strong(0.5 * X, Matrix::Identity(2, 2)), DimensionMismatch);
}

TEST(RandomImage, EquipartitionFrontFactorIsPhiTwo) {
    const auto b = basis_n(12);
    const double X = b.geometry().width();
    const auto c = ideal_coupling(b);
    const auto refl = two_targets(b);
    const auto im = imager(b, c, 0.0, 1.0, refl);
    double rr = 0.0;  // int int r r Phi_{-1}^2 for point targets
    for (const auto& p : refl.points) {
        for (const auto& q : refl.points) {
            rr += p.strength * q.strength * std::pow(phi_sum(-1, p.position, q.position, b), 2);
        }
    }
    for (double x : {0.15 * X, 0.5 * X, 0.8 * X}) {
        const double expect = -2.0 * prefactor(b, 1.0) * phi_sum(2, x, x, b) * rr / b.size();
        expect_close(im.equipartition(x), expect, 1e-12, 0.0, "equipartition");
    }
}

TEST(RandomImage, RandomReferenceIgnoresApertures) {
    const auto b = basis_n(40);
    const double X = b.geometry().width();
    const Reflectivity refl{{{0.39 * X, 1.0}}, {}};
    const auto full = imager(b, ideal_coupling(b), 0.05, 1.0, refl);
    const auto narrow =
        imager(b, build_coupling({{0.0, 0.05 * X}, Incoherent{}}, {{0.0, 0.05 * X}}, b), 0.05, 1.0, refl);
    const auto xs = uniform_grid(0.0, X, 512);
    const double nf = std::abs(full.random_reference(0.39 * X));
    const double nn = std::abs(narrow.random_reference(0.39 * X));
    std::vector<double> v;
    for (double x : xs) {
        const double a = full.random_reference(x) / nf;
        EXPECT_NEAR(a, narrow.random_reference(x) / nn, 1e-12);
        v.push_back(a);
    }
    const auto peak = analyze_shadow(xs, v);
    EXPECT_LE(std::abs(peak.position - 0.39 * X), X / 511);
    const double half_lambda = 0.5 * b.geometry().wavelength();
    EXPECT_NEAR(peak.half_width / half_lambda, 1.0, 0.3);
}

TEST(RandomImage, ZeroTargetGivesZeroEverywhere) {
    const auto b = basis_n(5);
    const double X = b.geometry().width();
    const auto im = imager(b, partial_coupling(b), 0.1, 2.0, Reflectivity{{{0.4 * X, 0.0}}, {}});
    for (double x : {0.2 * X, 0.5 * X}) {
        EXPECT_EQ(im.general(x), 0.0);
        EXPECT_EQ(im.weak(x), 0.0);
        EXPECT_EQ(im.strong(x), 0.0);
        EXPECT_EQ(im.equipartition(x), 0.0);
        EXPECT_EQ(im.random_reference(x), 0.0);
    }
}

TEST(RandomImage, EmptyDetectorGivesZero) {
    const auto b = basis_n(5);
    const double X = b.geometry().width();
    CouplingMatrices c = partial_coupling(b);
    c.D.setZero();
    c.C_D = 0.0;
    const auto im = imager(b, c, 0.1, 2.0);
    EXPECT_EQ(im.weak(0.3 * X), 0.0);
    EXPECT_EQ(im.general(0.3 * X), 0.0);
    ScaledRanges r;
    EXPECT_EQ(IncidentFlux(b, c, build_scattering_model(UniformRate{0.1}, b), r)(0.3 * X), 0.0);
}

TEST(RandomImage, Warnings) {
    const auto b = basis_n(5);
    const auto strong = imager(b, partial_coupling(b), 0.5, 2.0);
    const auto w = strong.warnings("weak");
    EXPECT_FALSE(w.empty());
    const auto weak = imager(b, partial_coupling(b), 1e-4, 1.0);
    EXPECT_TRUE(weak.warnings("weak").empty());
    EXPECT_FALSE(weak.warnings("equipartition").empty());
}

TEST(IncidentFlux, LimitsEqualPhiTwoClosedForm) {
    const auto b = basis_n(40);
    const double X = b.geometry().width();
    const auto c = ideal_coupling(b);
    const double k0 = b.geometry().wavenumber();
    const double g = 0.02;
    ScaledRanges weak_r;
    ScaledRanges far_r;
    far_r.L = 50.0 / (40 * g);
    const IncidentFlux weak(b, c, build_scattering_model(UniformRate{0.0}, b), weak_r);
    const IncidentFlux far(b, c, build_scattering_model(UniformRate{g}, b), far_r);
    for (double x : uniform_grid(0.01 * X, 0.99 * X, 51)) {
        const double closed = phi_sum(2, x, x, b) / (8.0 * k0 * k0);
        EXPECT_NEAR(weak(x), closed, 1e-10 * closed);
        EXPECT_NEAR(far(x), closed, 1e-10 * closed);
    }
}
