#pragma once

// Second-moment statistics of the random propagator: coherent exponents
// kappa, the coupled-power generator Gamma, the mean power transfer
// exp(Gamma L) and the equipartition distance.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <queue>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Eigenvalues>

#include "ghostguide/waveguide.hpp"

namespace ghostguide {

using ComplexMatrix = Eigen::MatrixXcd;

struct ScatteringModel {
    ComplexMatrix kappa;
    Matrix gamma;
    double L_eq = std::numeric_limits<double>::infinity();
    bool reducible = false;

    int size() const noexcept { return static_cast<int>(gamma.rows()); }
};

/// How Gamma is specified.
struct UniformRate {
    double rate = 0.0;  ///< Gamma_jk = rate for j != k
};
struct PairRates {
    Matrix rates;  ///< symmetric, off-diagonal entries used
};
struct ExplicitGenerator {
    Matrix gamma;
};
using ScatteringSpec = std::variant<UniformRate, PairRates, ExplicitGenerator>;

namespace detail {

inline Eigen::SelfAdjointEigenSolver<Matrix> generator_spectrum(const Matrix& gamma) {
    return Eigen::SelfAdjointEigenSolver<Matrix>(gamma);
}

/// Connected components of the coupling graph (edges where Gamma_jk > 0).
inline int coupling_components(const Matrix& gamma) {
    const auto n = gamma.rows();
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    int components = 0;
    for (Eigen::Index s = 0; s < n; ++s) {
        if (seen[static_cast<std::size_t>(s)]) {
            continue;
        }
        ++components;
        std::queue<Eigen::Index> q;
        q.push(s);
        seen[static_cast<std::size_t>(s)] = true;
        while (!q.empty()) {
            const auto u = q.front();
            q.pop();
            for (Eigen::Index v = 0; v < n; ++v) {
                if (v != u && gamma(v, u) > 0.0 && !seen[static_cast<std::size_t>(v)]) {
                    seen[static_cast<std::size_t>(v)] = true;
                    q.push(v);
                }
            }
        }
    }
    return components;
}

inline void check_generator(const Matrix& g) {
    const auto n = g.rows();
    if (g.cols() != n) {
        throw InvalidModel("transport generator must be square");
    }
    const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
    if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw InvalidModel("transport generator must be symmetric");
    }
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = 0; k < n; ++k) {
            if (j != k && g(j, k) < 0.0) {
                throw InvalidModel("transport generator has a negative transfer rate");
            }
        }
        if (std::abs(g.col(j).sum()) > 1e-12 * scale * static_cast<double>(n)) {
            throw InvalidModel("transport generator columns must sum to zero");
        }
    }
}

}  // namespace detail

/// Smallest nonzero decay rate of exp(Gamma L) toward its limit, inverted.
/// Throws NoEquipartition when Gamma = 0.
inline double equipartition_distance(const Matrix& gamma) {
    if (gamma.cwiseAbs().maxCoeff() == 0.0) {
        throw NoEquipartition("no mode coupling: energy never equipartitions");
    }
    const Vector ev = detail::generator_spectrum(gamma).eigenvalues();  // ascending, <= 0
    const double top = ev.cwiseAbs().maxCoeff();
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        const double m = std::abs(ev(i));
        if (m > 1e-12 * top) {
            gap = std::min(gap, m);
        }
    }
    return 1.0 / gap;
}

inline double equipartition_distance(const ScatteringModel& model) { return equipartition_distance(model.gamma); }

/// Builds Gamma from the spec, then kappa with
///   Re kappa_jj = Gamma_jj = -sum_{n != j} Gamma_nj,
///   Re kappa_jk = (Re kappa_jj + Re kappa_kk) / 2,
///   Im kappa_jk from the optional antisymmetric profile (zero diagonal).
inline ScatteringModel build_scattering_model(const ScatteringSpec& spec, const ModeBasis& basis,
                                              const std::optional<Matrix>& imag_kappa = std::nullopt) {
    const int n = basis.size();
    Matrix gamma = Matrix::Zero(n, n);
    if (const auto* u = std::get_if<UniformRate>(&spec)) {
        if (!(u->rate >= 0.0)) {
            throw InvalidModel("scattering rate must be non-negative");
        }
        gamma.setConstant(u->rate);
        gamma.diagonal().setConstant(u->rate > 0.0 ? -(n - 1) * u->rate : 0.0);
    } else if (const auto* p = std::get_if<PairRates>(&spec)) {
        if (p->rates.rows() != n || p->rates.cols() != n) {
            throw DimensionMismatch("pair-rate matrix must be N x N");
        }
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                if (j == k) {
                    continue;
                }
                if (!(p->rates(j, k) >= 0.0)) {
                    throw InvalidModel("scattering rate must be non-negative");
                }
                if (p->rates(j, k) != p->rates(k, j)) {
                    throw InvalidModel("pair rates must be symmetric");
                }
                gamma(j, k) = p->rates(j, k);
            }
        }
        for (int j = 0; j < n; ++j) {
            gamma(j, j) = -(gamma.col(j).sum());
        }
    } else {
        gamma = std::get<ExplicitGenerator>(spec).gamma;
        if (gamma.rows() != n) {
            throw DimensionMismatch("transport generator must be N x N");
        }
    }
    detail::check_generator(gamma);

    ScatteringModel m;
    m.gamma = gamma;
    m.kappa = ComplexMatrix::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            m.kappa(j, k) = {0.5 * (gamma(j, j) + gamma(k, k)), 0.0};
        }
    }
    if (imag_kappa) {
        const Matrix& im = *imag_kappa;
        if (im.rows() != n || im.cols() != n) {
            throw DimensionMismatch("Im kappa profile must be N x N");
        }
        if ((im + im.transpose()).cwiseAbs().maxCoeff() > 0.0 || im.diagonal().cwiseAbs().maxCoeff() > 0.0) {
            throw InvalidModel("Im kappa must be antisymmetric with zero diagonal");
        }
        m.kappa.imag() = im;
    }
    if (gamma.cwiseAbs().maxCoeff() > 0.0) {
        m.L_eq = equipartition_distance(gamma);
        m.reducible = detail::coupling_components(gamma) > 1;
    }
    return m;
}

/// Mean fraction of mode-k power found in mode j after range L, exp(Gamma L).
/// Columns sum to one; identity at L = 0; tends to ones / N for an
/// irreducible generator.
inline Matrix wigner_integrals(const ScatteringModel& model, double L) {
    if (!(L >= 0.0)) {
        throw DomainError("range must be non-negative");
    }
    if (L == 0.0) {
        return Matrix::Identity(model.size(), model.size());
    }
    const auto es = detail::generator_spectrum(model.gamma);
    const Vector e = (es.eigenvalues() * L).array().exp();
    return es.eigenvectors() * e.asDiagonal() * es.eigenvectors().transpose();
}

/// Entrywise exp(kappa_jk L).
inline ComplexMatrix coherent_damping(const ScatteringModel& model, double L) {
    if (!(L >= 0.0)) {
        throw DomainError("range must be non-negative");
    }
    return (model.kappa * L).array().exp().matrix();
}

/// Time-integrated Wigner transform int W_j^(k) dt: the incoherent part of
/// the power transfer, exp(Gamma L) - diag(exp(kappa_jj L)). Non-negative and
/// zero at L = 0.
inline Matrix incoherent_transfer(const ScatteringModel& model, double L) {
    Matrix w = wigner_integrals(model, L);
    for (int j = 0; j < model.size(); ++j) {
        w(j, j) -= std::exp(model.kappa(j, j).real() * L);
    }
    return w;
}

/// max_j |Re kappa_jj|, the inverse of the shortest scattering mean free path.
inline double max_coherent_rate(const ScatteringModel& model) {
    double k = 0.0;
    for (int j = 0; j < model.size(); ++j) {
        k = std::max(k, std::abs(model.kappa(j, j).real()));
    }
    return k;
}

}  // namespace ghostguide
