#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "ghostguide/phi_sums.hpp"

using namespace ghostguide;

namespace {

ModeBasis basis40() { return build_mode_basis(WaveguideGeometry::in_wavelengths(20.25)); }

}  // namespace

TEST(PhiSum, SingleModeBasis) {
    const auto b = build_mode_basis(WaveguideGeometry::in_wavelengths(0.6));
    ASSERT_EQ(b.size(), 1);
    const double X = b.geometry().width();
    for (double x : {0.1 * X, 0.4 * X}) {
        for (double y : {0.3 * X, 0.9 * X}) {
            EXPECT_DOUBLE_EQ(phi_sum(0, x, y, b), b.shape(1, x) * b.shape(1, y));
            EXPECT_DOUBLE_EQ(phi_sum(2, x, y, b), std::pow(b.beta()(0), 2) * b.shape(1, x) * b.shape(1, y));
        }
    }
}

TEST(PhiSum, UnitWeightsLeaveSumUnchanged) {
    const auto b = basis40();
    const double X = b.geometry().width();
    const Vector ones = Vector::Ones(40);
    for (int n = -1; n <= 2; ++n) {
        EXPECT_EQ(phi_sum(n, 0.3 * X, 0.61 * X, b, ones), phi_sum(n, 0.3 * X, 0.61 * X, b));
    }
}

TEST(PhiSum, ReversedOrderResummation) {
    const auto b = basis40();
    const double X = b.geometry().width();
    double reversed = 0.0;
    for (int j = 40; j >= 1; --j) {
        reversed += std::pow(b.shape(j, X / 2), 2) / b.beta()(j - 1);
    }
    EXPECT_NEAR(phi_sum(-1, X / 2, X / 2, b), reversed, 1e-14 * reversed);
}

TEST(PhiSum, SymmetricAndWeighted) {
    const auto b = basis40();
    const double X = b.geometry().width();
    Vector w(40);
    for (int j = 0; j < 40; ++j) {
        w(j) = 1.0 / (j + 1.0);
    }
    const PhiKernel k(b, 1, w);
    EXPECT_EQ(k.order(), 1);
    EXPECT_NEAR(k(0.2 * X, 0.7 * X), k(0.7 * X, 0.2 * X), 1e-14);
    double direct = 0.0;
    for (int j = 1; j <= 40; ++j) {
        direct += w(j - 1) * b.beta()(j - 1) * b.shape(j, 0.2 * X) * b.shape(j, 0.7 * X);
    }
    EXPECT_NEAR(k(0.2 * X, 0.7 * X), direct, 1e-12);
    EXPECT_THROW(PhiKernel(b, 3), DomainError);
    EXPECT_THROW(PhiKernel(b, 0, Vector::Ones(3)), DimensionMismatch);
}

TEST(BesselApprox, ZeroSeparation) {
    const auto g = WaveguideGeometry::in_wavelengths(20.25);
    const double k0 = g.wavenumber();
    EXPECT_DOUBLE_EQ(phi_bessel_approx(-1, 0.0, g), 0.5);
    EXPECT_DOUBLE_EQ(phi_bessel_approx(0, 0.0, g), k0 / std::numbers::pi);
    EXPECT_DOUBLE_EQ(phi_bessel_approx(1, 0.0, g), k0 * k0 / 4.0);
    EXPECT_THROW(phi_bessel_approx(2, 0.0, g), DomainError);
}

TEST(BesselApprox, TabulatedBesselValues) {
    // J0(t), J1(t) reference values
    struct Row {
        double t, j0, j1;
    };
    const Row table[] = {
        {0.5, 0.938469807240813, 0.24226845767487387},  {2.5, -0.04838377646819804, 0.497094102464274},
        {7.9, 0.1943618448412782, 0.21917939992175126}, {8.1, 0.14751745404437763, 0.24760776698159287},
        {15.0, -0.014224472826780597, 0.20510403861352278}, {40.0, 0.007366890584236951, 0.126038318037585},
    };
    // k0 = 1: the argument equals the separation
    const WaveguideGeometry g(100.0, 1.0, 1.0);
    for (const auto& r : table) {
        EXPECT_NEAR(phi_bessel_approx(-1, r.t, g), 0.5 * r.j0, 1e-12) << r.t;
        EXPECT_NEAR(phi_bessel_approx(-1, -r.t, g), 0.5 * r.j0, 1e-12) << r.t;
        EXPECT_NEAR(phi_bessel_approx(1, r.t, g), 0.5 * r.j1 / r.t, 1e-12) << r.t;
        EXPECT_NEAR(phi_bessel_approx(0, r.t, g), std::sin(r.t) / r.t / std::numbers::pi, 1e-15) << r.t;
    }
}

TEST(BesselApprox, SmallArgumentBranchIsContinuous) {
    const WaveguideGeometry g(100.0, 1.0, 1.0);
    EXPECT_NEAR(phi_bessel_approx(1, 1e-8, g), phi_bessel_approx(1, 1.0001e-8, g), 1e-15);
    EXPECT_NEAR(phi_bessel_approx(1, 1e-4, g), 0.5 * std::cyl_bessel_j(1.0, 1e-4) / 1e-4, 1e-15);
}

// Many-mode sums approach their Bessel forms away from the walls (the
// n = -1 case converges more slowly; see the acceptance suite).
TEST(BesselApprox, ManyModeSumsCloseToContinuumForm) {
    const auto b = basis40();
    const double X = b.geometry().width();
    for (int n : {0, 1}) {
        const double peak = phi_bessel_approx(n, 0.0, b.geometry());
        double worst = 0.0;
        for (int i = 0; i <= 80; ++i) {
            for (int k = 0; k <= 80; ++k) {
                const double x = 0.1 * X + 0.8 * X * i / 80.0;
                const double y = 0.1 * X + 0.8 * X * k / 80.0;
                worst = std::max(worst, std::abs(phi_sum(n, x, y, b) - phi_bessel_approx(n, x - y, b.geometry())));
            }
        }
        EXPECT_LT(worst / peak, 0.1) << "n=" << n;
    }
}
