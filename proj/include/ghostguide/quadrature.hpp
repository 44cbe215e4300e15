#pragma once

// Gauss-Legendre rules and the adaptive composite integrator shared by the
// coupling matrices and the smooth-reflectivity moments.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "ghostguide/error.hpp"

namespace ghostguide {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const noexcept { return nodes.size(); }
};

/// n-point Gauss-Legendre rule on [-1, 1] by Newton iteration on P_n.
inline QuadratureRule gauss_legendre(int n) {
    if (n < 1) {
        throw DomainError("Gauss-Legendre rule needs at least one node");
    }
    // (P_n(z), P_n'(z)) by the three-term recurrence
    auto legendre = [n](double z) {
        double p0 = 1.0;
        double p1 = z;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        return std::pair{p1, n * (z * p1 - p0) / (z * z - 1.0)};
    };

    QuadratureRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            const auto [p, dp] = legendre(z);
            const double dz = p / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) {
                break;
            }
        }
        const double dp = legendre(z).second;
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        const auto lo = static_cast<std::size_t>(i);
        const auto hi = static_cast<std::size_t>(n - 1 - i);
        rule.nodes[lo] = -z;
        rule.nodes[hi] = z;
        rule.weights[lo] = w;
        rule.weights[hi] = w;
    }
    if (n % 2 == 1) {
        rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
    }
    return rule;
}

/// Composite rule: `panels` equal panels on [a, b], each with an `order`-point
/// Gauss-Legendre rule.
inline QuadratureRule composite_gauss_legendre(double a, double b, int panels, int order = 8) {
    if (panels < 1) {
        throw DomainError("composite rule needs at least one panel");
    }
    const QuadratureRule base = gauss_legendre(order);
    QuadratureRule rule;
    rule.nodes.reserve(static_cast<std::size_t>(panels * order));
    rule.weights.reserve(static_cast<std::size_t>(panels * order));
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        for (std::size_t i = 0; i < base.size(); ++i) {
            rule.nodes.push_back(mid + 0.5 * h * base.nodes[i]);
            rule.weights.push_back(0.5 * h * base.weights[i]);
        }
    }
    return rule;
}

/// Pairwise (cascade) summation, deterministic for a fixed input order.
template <class Range>
double pairwise_sum(const Range& values) {
    std::vector<double> buf(std::begin(values), std::end(values));
    if (buf.empty()) {
        return 0.0;
    }
    while (buf.size() > 1) {
        std::size_t out = 0;
        for (std::size_t i = 0; i + 1 < buf.size(); i += 2) {
            buf[out++] = buf[i] + buf[i + 1];
        }
        if (buf.size() % 2 == 1) {
            buf[out++] = buf.back();
        }
        buf.resize(out);
    }
    return buf.front();
}

struct QuadratureOptions {
    /// Length setting the minimal node density, usually the carrier wavelength.
    double wavelength = 1.0;
    double nodes_per_wavelength = 6.0;
    int order = 8;
    double rel_tol = 1e-8;
    double abs_tol = 1e-14;
    int max_panels = 1 << 14;
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int panels = 0;
    bool converged = false;  ///< false flags a QuadratureWarning
};

/// Composite Gauss-Legendre integral of f over [a, b]. The panel count is
/// doubled until two successive estimates agree to rel_tol; the finer one is
/// returned. Non-convergence at max_panels is reported, not thrown.
template <class F>
QuadratureResult smooth_quadrature(F&& f, double a, double b, const QuadratureOptions& opt = {}) {
    if (!(b > a)) {
        throw DomainError("quadrature support must be a non-empty interval");
    }
    const double nodes_needed = opt.nodes_per_wavelength * (b - a) / opt.wavelength;
    int panels = std::max(1, static_cast<int>(std::ceil(nodes_needed / opt.order)));

    auto integrate = [&](int p) {
        const QuadratureRule rule = composite_gauss_legendre(a, b, p, opt.order);
        std::vector<double> terms(rule.size());
        for (std::size_t i = 0; i < rule.size(); ++i) {
            terms[i] = rule.weights[i] * f(rule.nodes[i]);
        }
        return pairwise_sum(terms);
    };

    QuadratureResult res;
    double coarse = integrate(panels);
    while (true) {
        const int fine_panels = 2 * panels;
        const double fine = integrate(fine_panels);
        res.value = fine;
        res.panels = fine_panels;
        res.error_estimate = std::abs(fine - coarse);
        if (res.error_estimate <= std::max(opt.rel_tol * std::abs(fine), opt.abs_tol)) {
            res.converged = true;
            return res;
        }
        if (fine_panels >= opt.max_panels) {
            return res;
        }
        panels = fine_panels;
        coarse = fine;
    }
}

}  // namespace ghostguide
