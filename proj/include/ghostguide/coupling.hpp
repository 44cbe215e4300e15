#pragma once

// Source coherence, source/detector apertures and their projections S, D on
// mode pairs, plus the scalar constants C_D and C_S.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <tuple>
#include <utility>
#include <variant>

#include <Eigen/Eigenvalues>

#include "ghostguide/quadrature.hpp"
#include "ghostguide/waveguide.hpp"

namespace ghostguide {

struct Aperture {
    double lo = 0.0;
    double hi = 0.0;

    double length() const noexcept { return hi - lo; }

    void validate(double width, const char* what) const {
        if (!(lo >= 0.0 && lo < hi && hi <= width)) {
            throw DomainError(std::string(what) + " aperture must satisfy 0 <= lo < hi <= X");
        }
    }
};

/// Delta-correlated source: theta(xi, xi') = delta(xi - xi') on the aperture.
struct Incoherent {};

/// theta(xi, xi') = exp(-(xi - xi')^2 / (2 l^2)) on the aperture.
struct GaussianKernel {
    double correlation_length = 1.0;
};

/// theta sampled on a uniform grid spanning the aperture, endpoints included.
/// values(p, q) = theta(xi_p, xi_q).
struct GridKernel {
    Matrix values;
};

using Coherence = std::variant<Incoherent, GaussianKernel, GridKernel>;

struct SourceModel {
    Aperture aperture;
    Coherence coherence = Incoherent{};
};

struct DetectorModel {
    Aperture aperture;
};

struct CouplingMatrices {
    Matrix S;
    Matrix D;
    double C_D = 0.0;
    double C_S = 0.0;
};

/// Quadrature for the Gaussian kernel double integral: composite
/// Gauss-Legendre, refined by panel doubling until the largest entry change
/// is below `tolerance` (relative to max(1, max |S_jk|)).
struct CouplingOptions {
    double nodes_per_wavelength = 4.0;
    int order = 8;
    double tolerance = 1e-11;
    int max_nodes = 4096;
};

/// M_jk = int_lo^hi phi_j phi_k dx in closed form.
inline Matrix interval_overlap_matrix(const ModeBasis& basis, const Aperture& ap) {
    const int n = basis.size();
    const double X = basis.geometry().width();
    const double a = std::numbers::pi / X;
    // int_lo^hi cos(a m x) dx
    auto cos_integral = [&](int m) {
        if (m == 0) {
            return ap.hi - ap.lo;
        }
        return (std::sin(a * m * ap.hi) - std::sin(a * m * ap.lo)) / (a * m);
    };
    Matrix m(n, n);
    for (int j = 1; j <= n; ++j) {
        for (int k = j; k <= n; ++k) {
            const double v = (cos_integral(j - k) - cos_integral(j + k)) / X;
            m(j - 1, k - 1) = v;
            m(k - 1, j - 1) = v;
        }
    }
    return m;
}

namespace detail {

inline void check_grid_kernel(const GridKernel& g) {
    const Matrix& t = g.values;
    if (t.rows() < 2 || t.rows() != t.cols()) {
        throw InvalidKernel("grid kernel must be a square matrix with at least 2 samples");
    }
    const double scale = std::max(1.0, t.cwiseAbs().maxCoeff());
    if ((t - t.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw InvalidKernel("grid kernel is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(t, Eigen::EigenvaluesOnly);
    const Vector& ev = es.eigenvalues();
    const double top = ev.cwiseAbs().maxCoeff();
    if (ev.minCoeff() < -1e-8 * top) {
        throw InvalidKernel("grid kernel is not positive semidefinite");
    }
}

}  // namespace detail

/// S_jk = double integral over the aperture of theta(xi, xi') phi_j(xi) phi_k(xi').
inline Matrix source_coupling_matrix(const SourceModel& source, const ModeBasis& basis,
                                     const CouplingOptions& opt = {}) {
    const double X = basis.geometry().width();
    const Aperture& ap = source.aperture;
    ap.validate(X, "source");

    if (std::holds_alternative<Incoherent>(source.coherence)) {
        return interval_overlap_matrix(basis, ap);
    }

    // S = (Phi W) theta (Phi W)^T for nodes xs with weights w
    auto assemble = [&](const std::vector<double>& xs, const Vector& w, const Matrix& theta) {
        const Matrix weighted = basis.shapes(xs) * w.asDiagonal();
        Matrix s = weighted * theta * weighted.transpose();
        return Matrix(0.5 * (s + s.transpose()));
    };

    if (const auto* g = std::get_if<GaussianKernel>(&source.coherence)) {
        const double l = g->correlation_length;
        if (!(l > 0.0)) {
            throw InvalidKernel("Gaussian correlation length must be positive");
        }
        const double lambda = basis.geometry().wavelength();
        auto integrate = [&](int panels) {
            const QuadratureRule rule = composite_gauss_legendre(ap.lo, ap.hi, panels, opt.order);
            const auto m = static_cast<Eigen::Index>(rule.size());
            const Vector w = Eigen::Map<const Vector>(rule.weights.data(), m);
            Matrix theta(m, m);
            for (Eigen::Index p = 0; p < m; ++p) {
                for (Eigen::Index q = 0; q < m; ++q) {
                    const double d = rule.nodes[static_cast<std::size_t>(p)] - rule.nodes[static_cast<std::size_t>(q)];
                    theta(p, q) = std::exp(-d * d / (2.0 * l * l));
                }
            }
            return assemble(rule.nodes, w, theta);
        };
        // resolve both the modes and the kernel width, then refine
        const double nodes = std::max(opt.nodes_per_wavelength * ap.length() / lambda, 2.0 * ap.length() / l);
        int panels = std::max(1, static_cast<int>(std::ceil(nodes / opt.order)));
        Matrix coarse = integrate(panels);
        while (2 * panels * opt.order <= opt.max_nodes) {
            Matrix fine = integrate(2 * panels);
            const double err = (fine - coarse).cwiseAbs().maxCoeff();
            coarse = std::move(fine);
            if (err <= opt.tolerance * std::max(1.0, coarse.cwiseAbs().maxCoeff())) {
                break;
            }
            panels *= 2;
        }
        return coarse;
    }

    const auto& grid = std::get<GridKernel>(source.coherence);
    detail::check_grid_kernel(grid);
    const auto m = grid.values.rows();
    const double h = ap.length() / static_cast<double>(m - 1);
    std::vector<double> xs(static_cast<std::size_t>(m));
    Vector w = Vector::Constant(m, h);
    w(0) = w(m - 1) = 0.5 * h;
    for (Eigen::Index i = 0; i < m; ++i) {
        xs[static_cast<std::size_t>(i)] = ap.lo + static_cast<double>(i) * h;
    }
    return assemble(xs, w, grid.values);
}

/// D_jk = int over the detector aperture of phi_j phi_k.
inline Matrix detector_coupling_matrix(const DetectorModel& detector, const ModeBasis& basis) {
    detector.aperture.validate(basis.geometry().width(), "detector");
    return interval_overlap_matrix(basis, detector.aperture);
}

/// C_D = trace(D) / N and C_S = (sum_j S_jj beta_j)^2 / (N (N + 1)).
inline std::pair<double, double> coupling_constants(const Matrix& S, const Matrix& D, const ModeBasis& basis) {
    const int n = basis.size();
    if (S.rows() != n || S.cols() != n || D.rows() != n || D.cols() != n) {
        throw DimensionMismatch("coupling matrices do not match the mode basis");
    }
    const double cd = D.trace() / n;
    const double sb = S.diagonal().dot(basis.beta());
    const double cs = sb * sb / (static_cast<double>(n) * (n + 1));
    return {cd, cs};
}

inline CouplingMatrices build_coupling(const SourceModel& source, const DetectorModel& detector,
                                       const ModeBasis& basis, const CouplingOptions& opt = {}) {
    CouplingMatrices c;
    c.S = source_coupling_matrix(source, basis, opt);
    c.D = detector_coupling_matrix(detector, basis);
    std::tie(c.C_D, c.C_S) = coupling_constants(c.S, c.D, basis);
    return c;
}

/// Coupling for the ideal configuration: incoherent full-aperture source and
/// full-aperture detector (S = D = identity).
inline CouplingMatrices ideal_coupling(const ModeBasis& basis) {
    const double X = basis.geometry().width();
    return build_coupling(SourceModel{{0.0, X}, Incoherent{}}, DetectorModel{{0.0, X}}, basis);
}

}  // namespace ghostguide
