#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "ghostguide/coupling.hpp"

using namespace ghostguide;

namespace {

ModeBasis basis40() { return build_mode_basis(WaveguideGeometry::in_wavelengths(20.25)); }

double sinc(double t) { return t == 0.0 ? 1.0 : std::sin(t) / t; }

// int_0^X phi_j dx
double mode_integral(int j, double X) {
    return std::sqrt(2.0 / X) * X / (std::numbers::pi * j) * (1.0 - std::cos(std::numbers::pi * j));
}

}  // namespace

TEST(SourceCoupling, FullIncoherentApertureIsIdentity) {
    const auto b = basis40();
    const Matrix S = source_coupling_matrix({{0.0, b.geometry().width()}, Incoherent{}}, b);
    EXPECT_LT((S - Matrix::Identity(40, 40)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(SourceCoupling, PartialApertureDiagonal) {
    const auto b = basis40();
    const double X = b.geometry().width();
    for (double frac : {0.05, 0.3, 0.75}) {
        const double a = frac * X;
        const Matrix S = source_coupling_matrix({{0.0, a}, Incoherent{}}, b);
        for (int j = 1; j <= 40; ++j) {
            EXPECT_NEAR(S(j - 1, j - 1), (a / X) * (1.0 - sinc(2.0 * j * std::numbers::pi * a / X)), 1e-13);
        }
    }
}

TEST(SourceCoupling, LongCorrelationIsRankOne) {
    const auto b = basis40();
    const double X = b.geometry().width();
    const Matrix S = source_coupling_matrix({{0.0, X}, GaussianKernel{1e6 * X}}, b);
    for (int j = 1; j <= 40; ++j) {
        for (int k = 1; k <= 40; ++k) {
            EXPECT_NEAR(S(j - 1, k - 1), mode_integral(j, X) * mode_integral(k, X), 1e-10);
        }
    }
}

TEST(SourceCoupling, GaussianKernelMatchesDenseTensorRule) {
    const auto b = basis40();
    const double X = b.geometry().width();
    const double l = 0.1 * b.geometry().wavelength();
    const double lo = 0.2 * X;
    const double hi = 0.7 * X;
    const Matrix S = source_coupling_matrix({{lo, hi}, GaussianKernel{l}}, b);

    // plain 1200-point Gauss-Legendre in each variable
    const auto rule = gauss_legendre(1200);
    const double half = 0.5 * (hi - lo);
    Matrix phi(40, 1200);
    Vector w(1200);
    std::vector<double> xs(1200);
    for (int i = 0; i < 1200; ++i) {
        xs[i] = lo + half * (rule.nodes[i] + 1.0);
        w(i) = half * rule.weights[i];
        phi.col(i) = b.shapes(xs[i]);
    }
    Matrix theta(1200, 1200);
    for (int p = 0; p < 1200; ++p) {
        for (int q = 0; q < 1200; ++q) {
            theta(p, q) = std::exp(-std::pow(xs[p] - xs[q], 2) / (2 * l * l));
        }
    }
    const Matrix pw = phi * w.asDiagonal();
    const Matrix ref = pw * theta * pw.transpose();
    EXPECT_LT((S - ref).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((S - S.transpose()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(SourceCoupling, GaussianKernelIsPositiveSemidefinite) {
    const auto b = basis40();
    const double X = b.geometry().width();
    const Matrix S = source_coupling_matrix({{0.1 * X, 0.6 * X}, GaussianKernel{0.3}}, b);
    Eigen::SelfAdjointEigenSolver<Matrix> es(S);
    EXPECT_GT(es.eigenvalues().minCoeff(), -1e-12);
    EXPECT_THROW(source_coupling_matrix({{0.0, X}, GaussianKernel{0.0}}, b), InvalidKernel);
}

TEST(SourceCoupling, GridKernelMatchesGaussianKernel) {
    const auto b = basis40();
    const double X = b.geometry().width();
    const double l = 0.5;
    const int m = 1601;
    Matrix theta(m, m);
    const double h = X / (m - 1);
    for (int p = 0; p < m; ++p) {
        for (int q = 0; q < m; ++q) {
            theta(p, q) = std::exp(-std::pow((p - q) * h, 2) / (2 * l * l));
        }
    }
    const Matrix grid = source_coupling_matrix({{0.0, X}, GridKernel{theta}}, b);
    const Matrix gauss = source_coupling_matrix({{0.0, X}, GaussianKernel{l}}, b);
    // trapezoid rule, O(h^2)
    EXPECT_LT((grid - gauss).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(SourceCoupling, GridKernelValidation) {
    const auto b = basis40();
    const double X = b.geometry().width();
    Matrix asym = Matrix::Identity(4, 4);
    asym(0, 1) = 0.5;
    EXPECT_THROW(source_coupling_matrix({{0.0, X}, GridKernel{asym}}, b), InvalidKernel);
    EXPECT_THROW(source_coupling_matrix({{0.0, X}, GridKernel{-Matrix::Identity(4, 4)}}, b), InvalidKernel);
    EXPECT_THROW(source_coupling_matrix({{0.0, X}, GridKernel{Matrix::Identity(1, 1)}}, b), InvalidKernel);
}

TEST(DetectorCoupling, FullApertureIsIdentity) {
    const auto b = basis40();
    const Matrix D = detector_coupling_matrix({{0.0, b.geometry().width()}}, b);
    EXPECT_LT((D - Matrix::Identity(40, 40)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(DetectorCoupling, HalfApertureOffDiagonal) {
    const auto b = basis40();
    const double X = b.geometry().width();
    const Matrix D = detector_coupling_matrix({{0.0, X / 2}}, b);
    EXPECT_NEAR(D(0, 1), 4.0 / (3.0 * std::numbers::pi), 1e-14);
    EXPECT_NEAR(D(1, 0), D(0, 1), 0.0);
}

TEST(DetectorCoupling, PartialApertureDiagonal) {
    const auto b = basis40();
    const double X = b.geometry().width();
    const double a = 0.37 * X;
    const Matrix D = detector_coupling_matrix({{0.0, a}}, b);
    for (int j = 1; j <= 40; ++j) {
        EXPECT_NEAR(D(j - 1, j - 1), (a / X) * (1.0 - sinc(2.0 * j * std::numbers::pi * a / X)), 1e-13);
    }
}

TEST(DetectorCoupling, RejectsBadApertures) {
    const auto b = basis40();
    const double X = b.geometry().width();
    EXPECT_THROW(detector_coupling_matrix({{0.5, 0.5}}, b), DomainError);
    EXPECT_THROW(detector_coupling_matrix({{-0.1, 1.0}}, b), DomainError);
    EXPECT_THROW(detector_coupling_matrix({{0.0, 1.01 * X}}, b), DomainError);
}

TEST(CouplingConstants, DetectorAndSource) {
    const auto b = basis40();
    const double X = b.geometry().width();
    const auto ideal = ideal_coupling(b);
    EXPECT_NEAR(ideal.C_D, 1.0, 1e-14);
    const double sum_beta = b.beta().sum();
    EXPECT_NEAR(ideal.C_S, sum_beta * sum_beta / (40.0 * 41.0), 1e-12 * ideal.C_S);
    for (double frac : {0.1, 0.25, 0.5, 0.8, 1.0}) {
        const auto c = build_coupling({{0.0, X}, Incoherent{}}, {{0.0, frac * X}}, b);
        double sincs = 0.0;
        for (int j = 1; j <= 40; ++j) {
            sincs += sinc(2.0 * j * std::numbers::pi * frac);
        }
        EXPECT_NEAR(c.C_D, frac * (1.0 - sincs / 40.0), 1e-14) << frac;
        // a_d / X is only a fair estimate once the sinc tail has averaged out
        if (frac >= 0.25) {
            EXPECT_NEAR(c.C_D, frac, 0.02 * frac) << frac;
        }
    }
    EXPECT_THROW(coupling_constants(Matrix::Identity(3, 3), Matrix::Identity(40, 40), b), DimensionMismatch);
}
