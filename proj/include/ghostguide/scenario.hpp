#pragma once

// Scenario configuration (JSON), orchestration of the imaging regimes over a
// cross-range grid, figure normalization and CSV/JSON emission.

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ghostguide/coupling.hpp"
#include "ghostguide/homogeneous.hpp"
#include "ghostguide/parallel.hpp"
#include "ghostguide/random_imaging.hpp"
#include "ghostguide/reflectivity.hpp"
#include "ghostguide/scattering.hpp"
#include "ghostguide/waveguide.hpp"

namespace ghostguide {

using json = nlohmann::json;

inline const std::vector<std::string>& known_regimes() {
    static const std::vector<std::string> r{"homogeneous",  "homogeneous-long", "homogeneous-ideal",
                                            "general",      "weak",             "strong",
                                            "equipartition", "random-reference"};
    return r;
}

// Lengths (width, L, calL, Gaussian correlation length) are in carrier
// wavelengths when geometry.units == "wavelength", absolute otherwise; rates
// are per length unit. Positions and apertures are fractions of the width.
struct ScenarioConfig {
    struct Geometry {
        std::string units = "wavelength";
        double width = 20.25;
        double sound_speed = 1.0;
        double omega = 2.0 * std::numbers::pi;
        double density = 1.0;
        double cutoff_fraction = 1e-6;
    } geometry;

    struct Source {
        std::array<double, 2> aperture{0.0, 1.0};
        std::string coherence = "incoherent";  // incoherent | gaussian | grid
        double correlation_length = 0.0;
        std::vector<std::vector<double>> kernel;
    } source;

    struct Detector {
        std::array<double, 2> aperture{0.0, 1.0};
    } detector;

    struct Point {
        double position = 0.0;
        double strength = 1.0;
    };
    struct Targets {
        std::vector<Point> points;
        std::optional<std::array<double, 2>> profile_support;
        std::vector<double> profile_values;
    } reflectivity;

    struct Ranges {
        double L = 1.0;
        double calL = 100.0;
        double window = 2.0;
        // fastest_arrival: window * beta'_1 calL, slowest_arrival: window *
        // beta'_N calL, absolute: window in time units
        std::string window_units = "slowest_arrival";
        double spectrum_norm = 1.0;
    } ranges;

    struct Scattering {
        std::string kind = "none";  // none | uniform | pairs | generator
        double rate = 0.0;
        std::vector<std::vector<double>> matrix;
        std::vector<std::vector<double>> imag_kappa;
    } scattering;

    std::string regime = "homogeneous-long";
    int grid = 512;
    std::string normalize = "reference";
    int workers = 1;
};

namespace detail {

inline std::string join_path(const std::string& base, const std::string& key) {
    return base.empty() ? key : base + "." + key;
}

inline void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) {
        throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
    }
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) {
            ok = ok || key == a;
        }
        if (!ok) {
            throw ConfigError(join_path(path, key), "unknown field");
        }
    }
}

inline const json& section(const json& j, const char* key) {
    static const json empty = json::object();
    return j.contains(key) ? j.at(key) : empty;
}

inline double read_number(const json& j, const std::string& path, const char* key, double fallback) {
    if (!j.contains(key)) {
        return fallback;
    }
    const json& v = j.at(key);
    if (!v.is_number()) {
        throw ConfigError(join_path(path, key), "expected a number");
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
        throw ConfigError(join_path(path, key), "must be finite");
    }
    return d;
}

inline int read_int(const json& j, const std::string& path, const char* key, int fallback) {
    if (!j.contains(key)) {
        return fallback;
    }
    const json& v = j.at(key);
    if (!v.is_number_integer()) {
        throw ConfigError(join_path(path, key), "expected an integer");
    }
    return v.get<int>();
}

inline std::string read_choice(const json& j, const std::string& path, const char* key, const std::string& fallback,
                               const std::vector<std::string>& choices) {
    if (!j.contains(key)) {
        return fallback;
    }
    const json& v = j.at(key);
    if (!v.is_string()) {
        throw ConfigError(join_path(path, key), "expected a string");
    }
    auto s = v.get<std::string>();
    for (const auto& c : choices) {
        if (s == c) {
            return s;
        }
    }
    std::string list;
    for (const auto& c : choices) {
        list += (list.empty() ? "" : ", ") + c;
    }
    throw ConfigError(join_path(path, key), "'" + s + "' is not one of " + list);
}

inline std::vector<double> read_vector(const json& v, const std::string& path) {
    if (!v.is_array()) {
        throw ConfigError(path, "expected an array of numbers");
    }
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) {
            throw ConfigError(path, "expected an array of numbers");
        }
        out.push_back(e.get<double>());
    }
    return out;
}

inline std::array<double, 2> read_interval(const json& j, const std::string& path, const char* key,
                                           std::array<double, 2> fallback) {
    if (!j.contains(key)) {
        return fallback;
    }
    const auto v = read_vector(j.at(key), join_path(path, key));
    if (v.size() != 2 || !(v[0] >= 0.0 && v[0] < v[1] && v[1] <= 1.0)) {
        throw ConfigError(join_path(path, key), "expected [lo, hi] with 0 <= lo < hi <= 1 (fractions of the width)");
    }
    return {v[0], v[1]};
}

inline std::vector<std::vector<double>> read_matrix(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) {
        return {};
    }
    const std::string p = join_path(path, key);
    const json& v = j.at(key);
    if (!v.is_array() || v.empty()) {
        throw ConfigError(p, "expected a non-empty array of rows");
    }
    std::vector<std::vector<double>> rows;
    for (const auto& r : v) {
        rows.push_back(read_vector(r, p));
        if (rows.back().size() != v.size()) {
            throw ConfigError(p, "expected a square matrix");
        }
    }
    return rows;
}

inline Matrix to_matrix(const std::vector<std::vector<double>>& rows, double scale = 1.0) {
    const auto n = static_cast<Eigen::Index>(rows.size());
    Matrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = 0; k < n; ++k) {
            m(i, k) = scale * rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
        }
    }
    return m;
}

}  // namespace detail

/// Parses a scenario; missing fields take their defaults, unknown fields are
/// rejected. Errors carry the dotted path of the offending field.
inline ScenarioConfig parse_config(const json& j) {
    using namespace detail;
    ScenarioConfig c;
    check_keys(j, "", {"geometry", "source", "detector", "reflectivity", "ranges", "scattering", "regime", "grid",
                       "normalize", "workers"});

    const json& g = section(j, "geometry");
    check_keys(g, "geometry", {"units", "width", "sound_speed", "omega", "density", "cutoff_fraction"});
    c.geometry.units = read_choice(g, "geometry", "units", c.geometry.units, {"wavelength", "absolute"});
    c.geometry.width = read_number(g, "geometry", "width", c.geometry.width);
    c.geometry.sound_speed = read_number(g, "geometry", "sound_speed", c.geometry.sound_speed);
    c.geometry.omega = read_number(g, "geometry", "omega", c.geometry.omega);
    c.geometry.density = read_number(g, "geometry", "density", c.geometry.density);
    c.geometry.cutoff_fraction = read_number(g, "geometry", "cutoff_fraction", c.geometry.cutoff_fraction);
    for (const auto& [key, value] : {std::pair{"width", c.geometry.width}, std::pair{"sound_speed", c.geometry.sound_speed},
                                     std::pair{"omega", c.geometry.omega}, std::pair{"density", c.geometry.density}}) {
        if (!(value > 0.0)) {
            throw ConfigError(join_path("geometry", key), "must be positive");
        }
    }
    if (!(c.geometry.cutoff_fraction >= 0.0 && c.geometry.cutoff_fraction < 1.0)) {
        throw ConfigError("geometry.cutoff_fraction", "must lie in [0, 1)");
    }

    const json& s = section(j, "source");
    check_keys(s, "source", {"aperture", "coherence", "correlation_length", "kernel"});
    c.source.aperture = read_interval(s, "source", "aperture", c.source.aperture);
    c.source.coherence = read_choice(s, "source", "coherence", c.source.coherence, {"incoherent", "gaussian", "grid"});
    c.source.correlation_length = read_number(s, "source", "correlation_length", 0.0);
    c.source.kernel = read_matrix(s, "source", "kernel");
    if (c.source.coherence == "gaussian" && !(c.source.correlation_length > 0.0)) {
        throw ConfigError("source.correlation_length", "Gaussian coherence needs a positive correlation length");
    }
    if (c.source.coherence == "grid" && c.source.kernel.size() < 2) {
        throw ConfigError("source.kernel", "grid coherence needs a sampled kernel with at least 2 samples");
    }

    const json& d = section(j, "detector");
    check_keys(d, "detector", {"aperture"});
    c.detector.aperture = read_interval(d, "detector", "aperture", c.detector.aperture);

    const json& r = section(j, "reflectivity");
    check_keys(r, "reflectivity", {"points", "profile"});
    if (r.contains("points")) {
        const json& pts = r.at("points");
        if (!pts.is_array()) {
            throw ConfigError("reflectivity.points", "expected an array");
        }
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const std::string p = "reflectivity.points[" + std::to_string(i) + "]";
            check_keys(pts[i], p, {"position", "strength"});
            if (!pts[i].contains("position")) {
                throw ConfigError(join_path(p, "position"), "missing");
            }
            ScenarioConfig::Point pt;
            pt.position = read_number(pts[i], p, "position", 0.0);
            pt.strength = read_number(pts[i], p, "strength", 1.0);
            if (!(pt.position > 0.0 && pt.position < 1.0)) {
                throw ConfigError(join_path(p, "position"), "must lie strictly inside (0, 1) (fraction of the width)");
            }
            c.reflectivity.points.push_back(pt);
        }
    }
    if (r.contains("profile")) {
        const json& pr = r.at("profile");
        check_keys(pr, "reflectivity.profile", {"support", "values"});
        if (!pr.contains("support") || !pr.contains("values")) {
            throw ConfigError("reflectivity.profile", "needs 'support' and 'values'");
        }
        c.reflectivity.profile_support = read_interval(pr, "reflectivity.profile", "support", {0.0, 1.0});
        c.reflectivity.profile_values = read_vector(pr.at("values"), "reflectivity.profile.values");
        const auto& sup = *c.reflectivity.profile_support;
        if (!(sup[0] > 0.0 && sup[1] < 1.0)) {
            throw ConfigError("reflectivity.profile.support", "must lie strictly inside (0, 1)");
        }
        if (c.reflectivity.profile_values.size() < 2) {
            throw ConfigError("reflectivity.profile.values", "needs at least two samples");
        }
    }

    const json& rg = section(j, "ranges");
    check_keys(rg, "ranges", {"L", "calL", "window", "window_units", "spectrum_norm"});
    c.ranges.L = read_number(rg, "ranges", "L", c.ranges.L);
    c.ranges.calL = read_number(rg, "ranges", "calL", c.ranges.calL);
    c.ranges.window = read_number(rg, "ranges", "window", c.ranges.window);
    c.ranges.window_units = read_choice(rg, "ranges", "window_units", c.ranges.window_units,
                                        {"fastest_arrival", "slowest_arrival", "absolute"});
    c.ranges.spectrum_norm = read_number(rg, "ranges", "spectrum_norm", c.ranges.spectrum_norm);
    if (!(c.ranges.L > 0.0)) {
        throw ConfigError("ranges.L", "must be positive");
    }
    if (!(c.ranges.calL > 0.0)) {
        throw ConfigError("ranges.calL", "must be positive");
    }
    if (!(c.ranges.window >= 0.0)) {
        throw ConfigError("ranges.window", "must be non-negative");
    }
    if (!(c.ranges.spectrum_norm > 0.0)) {
        throw ConfigError("ranges.spectrum_norm", "must be positive");
    }

    const json& sc = section(j, "scattering");
    check_keys(sc, "scattering", {"kind", "rate", "matrix", "imag_kappa"});
    c.scattering.kind = read_choice(sc, "scattering", "kind", c.scattering.kind,
                                    {"none", "uniform", "pairs", "generator"});
    c.scattering.rate = read_number(sc, "scattering", "rate", 0.0);
    c.scattering.matrix = read_matrix(sc, "scattering", "matrix");
    c.scattering.imag_kappa = read_matrix(sc, "scattering", "imag_kappa");
    if (c.scattering.kind == "uniform" && !(c.scattering.rate >= 0.0)) {
        throw ConfigError("scattering.rate", "must be non-negative");
    }
    if ((c.scattering.kind == "pairs" || c.scattering.kind == "generator") && c.scattering.matrix.empty()) {
        throw ConfigError("scattering.matrix", "required for kind '" + c.scattering.kind + "'");
    }

    c.regime = read_choice(j, "", "regime", c.regime, known_regimes());
    c.grid = read_int(j, "", "grid", c.grid);
    if (c.grid < 3) {
        throw ConfigError("grid", "needs at least 3 points");
    }
    c.normalize = read_choice(j, "", "normalize", c.normalize, {"reference", "none"});
    c.workers = read_int(j, "", "workers", c.workers);
    if (c.workers < 1) {
        throw ConfigError("workers", "must be >= 1");
    }
    return c;
}

/// Complete config with every default made explicit; parse_config of the
/// result reproduces `c`.
inline json to_json(const ScenarioConfig& c) {
    json j;
    j["geometry"] = {{"units", c.geometry.units},       {"width", c.geometry.width},
                     {"sound_speed", c.geometry.sound_speed}, {"omega", c.geometry.omega},
                     {"density", c.geometry.density},   {"cutoff_fraction", c.geometry.cutoff_fraction}};
    j["source"] = {{"aperture", c.source.aperture}, {"coherence", c.source.coherence}};
    if (c.source.coherence == "gaussian") {
        j["source"]["correlation_length"] = c.source.correlation_length;
    }
    if (c.source.coherence == "grid") {
        j["source"]["kernel"] = c.source.kernel;
    }
    j["detector"] = {{"aperture", c.detector.aperture}};
    json pts = json::array();
    for (const auto& p : c.reflectivity.points) {
        pts.push_back({{"position", p.position}, {"strength", p.strength}});
    }
    j["reflectivity"] = {{"points", pts}};
    if (c.reflectivity.profile_support) {
        j["reflectivity"]["profile"] = {{"support", *c.reflectivity.profile_support},
                                        {"values", c.reflectivity.profile_values}};
    }
    j["ranges"] = {{"L", c.ranges.L},
                   {"calL", c.ranges.calL},
                   {"window", c.ranges.window},
                   {"window_units", c.ranges.window_units},
                   {"spectrum_norm", c.ranges.spectrum_norm}};
    j["scattering"] = {{"kind", c.scattering.kind}};
    if (c.scattering.kind == "uniform") {
        j["scattering"]["rate"] = c.scattering.rate;
    }
    if (!c.scattering.matrix.empty()) {
        j["scattering"]["matrix"] = c.scattering.matrix;
    }
    if (!c.scattering.imag_kappa.empty()) {
        j["scattering"]["imag_kappa"] = c.scattering.imag_kappa;
    }
    j["regime"] = c.regime;
    j["grid"] = c.grid;
    j["normalize"] = c.normalize;
    j["workers"] = c.workers;
    return j;
}

inline ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config file '" + path + "'");
    }
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
    }
    return parse_config(j);
}

/// Physical objects resolved from a config, in absolute units.
struct Scenario {
    ScenarioConfig config;
    double length_unit = 1.0;
    ModeBasis basis;
    ScaledRanges ranges;
    CouplingMatrices coupling;
    Reflectivity reflectivity;
    ScatteringModel scattering;
};

namespace detail {

inline ModeBasis resolve_basis(const ScenarioConfig& c, double& unit) {
    const auto& g = c.geometry;
    unit = g.units == "wavelength" ? 2.0 * std::numbers::pi * g.sound_speed / g.omega : 1.0;
    const WaveguideGeometry geom(g.width * unit, g.sound_speed, g.omega, g.density);
    return build_mode_basis(geom, g.cutoff_fraction);
}

}  // namespace detail

/// Builds basis, couplings, target and scattering model. Module errors are
/// rethrown as ConfigError carrying the section they came from.
inline Scenario resolve_scenario(const ScenarioConfig& c) {
    double unit = 1.0;
    auto basis = [&] {
        try {
            return detail::resolve_basis(c, unit);
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            throw ConfigError("geometry", e.what());
        }
    }();
    const int n = basis.size();
    const double X = basis.geometry().width();

    ScaledRanges ranges;
    ranges.L = c.ranges.L * unit;
    ranges.calL = c.ranges.calL * unit;
    ranges.spectrum_norm = c.ranges.spectrum_norm;
    const auto& bp = basis.beta_prime();
    if (c.ranges.window_units == "fastest_arrival") {
        ranges.T = c.ranges.window * bp(0) * ranges.calL;
    } else if (c.ranges.window_units == "slowest_arrival") {
        ranges.T = c.ranges.window * bp(n - 1) * ranges.calL;
    } else {
        ranges.T = c.ranges.window;
    }

    CouplingMatrices coupling;
    try {
        SourceModel src{{c.source.aperture[0] * X, c.source.aperture[1] * X}, Incoherent{}};
        if (c.source.coherence == "gaussian") {
            src.coherence = GaussianKernel{c.source.correlation_length * unit};
        } else if (c.source.coherence == "grid") {
            src.coherence = GridKernel{detail::to_matrix(c.source.kernel)};
        }
        const DetectorModel det{{c.detector.aperture[0] * X, c.detector.aperture[1] * X}};
        coupling.S = source_coupling_matrix(src, basis);
        try {
            coupling.D = detector_coupling_matrix(det, basis);
        } catch (const Error& e) {
            throw ConfigError("detector", e.what());
        }
        std::tie(coupling.C_D, coupling.C_S) = coupling_constants(coupling.S, coupling.D, basis);
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError("source", e.what());
    }

    Reflectivity refl;
    for (const auto& p : c.reflectivity.points) {
        refl.points.push_back({p.position * X, p.strength});
    }
    if (c.reflectivity.profile_support) {
        const auto& sup = *c.reflectivity.profile_support;
        refl.profile = SmoothProfile::sampled(sup[0] * X, sup[1] * X, c.reflectivity.profile_values);
    }

    ScatteringModel model;
    try {
        std::optional<Matrix> imag;
        if (!c.scattering.imag_kappa.empty()) {
            imag = detail::to_matrix(c.scattering.imag_kappa, 1.0 / unit);
        }
        if (c.scattering.kind == "pairs") {
            model = build_scattering_model(PairRates{detail::to_matrix(c.scattering.matrix, 1.0 / unit)}, basis, imag);
        } else if (c.scattering.kind == "generator") {
            model = build_scattering_model(ExplicitGenerator{detail::to_matrix(c.scattering.matrix, 1.0 / unit)},
                                           basis, imag);
        } else {
            const double rate = c.scattering.kind == "uniform" ? c.scattering.rate / unit : 0.0;
            model = build_scattering_model(UniformRate{rate}, basis, imag);
        }
    } catch (const Error& e) {
        throw ConfigError("scattering", e.what());
    }

    return Scenario{c, unit, std::move(basis), ranges, std::move(coupling), std::move(refl), std::move(model)};
}

struct ImageProfile {
    std::vector<double> x;  ///< in the config's length unit
    std::vector<double> value;
    json metadata;
};

namespace detail {

/// Cross-range used for the reference normalization: the first point target,
/// else the peak of the sampled profile.
inline double reference_position(const Reflectivity& r) {
    if (!r.points.empty()) {
        return r.points.front().position;
    }
    const auto& p = *r.profile;
    const auto& v = p.samples;
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (std::abs(v[i]) > std::abs(v[best])) {
            best = i;
        }
    }
    return p.lo + (p.hi - p.lo) * static_cast<double>(best) / static_cast<double>(v.size() - 1);
}

inline json derived_metadata(const Scenario& s) {
    json d;
    const auto& g = s.basis.geometry();
    d["modes"] = s.basis.size();
    d["wavelength"] = g.wavelength();
    d["wavenumber"] = g.wavenumber();
    d["width"] = g.width();
    d["window"] = s.ranges.T;
    d["C_D"] = s.coupling.C_D;
    d["C_S"] = s.coupling.C_S;
    if (std::isfinite(s.scattering.L_eq)) {
        d["L_eq"] = s.scattering.L_eq / s.length_unit;
    }
    return d;
}

}  // namespace detail

/// |long-window unperturbed image| at the target for the full-aperture
/// incoherent configuration with the scenario's basis, ranges and target.
inline double reference_normalization(const Scenario& s) {
    HomogeneousImager ref({s.basis, s.ranges, ideal_coupling(s.basis), s.reflectivity});
    return std::abs(ref.long_time(detail::reference_position(s.reflectivity)));
}

inline ImageProfile run_scenario(const ScenarioConfig& config) {
    const Scenario s = resolve_scenario(config);
    try {
        s.reflectivity.validate(s.basis.geometry().width());
    } catch (const DomainError& e) {
        throw ConfigError("reflectivity", e.what());
    }

    const double X = s.basis.geometry().width();
    const auto xs = uniform_grid(0.0, X, static_cast<std::size_t>(config.grid));
    const auto workers = static_cast<unsigned>(config.workers);
    const std::string& regime = config.regime;
    std::vector<std::string> warnings;
    for (auto& w : s.ranges.warnings()) {
        warnings.push_back(std::move(w));
    }

    std::vector<double> values;
    if (regime.rfind("homogeneous", 0) == 0) {
        const HomogeneousImager im({s.basis, s.ranges, s.coupling, s.reflectivity});
        if (regime == "homogeneous") {
            values = evaluate_grid([&](double x) { return im.general(x); }, xs, workers);
        } else if (regime == "homogeneous-long") {
            values = evaluate_grid([&](double x) { return im.long_time(x); }, xs, workers);
        } else {
            values = evaluate_grid([&](double x) { return im.ideal(x); }, xs, workers);
        }
    } else {
        const RandomImager im({s.basis, s.ranges, s.coupling, s.scattering, s.reflectivity});
        for (auto& w : im.warnings(regime)) {
            warnings.push_back(std::move(w));
        }
        if (regime == "general") {
            values = evaluate_grid([&](double x) { return im.general(x); }, xs, workers);
        } else if (regime == "weak") {
            values = evaluate_grid([&](double x) { return im.weak(x); }, xs, workers);
        } else if (regime == "strong") {
            values = evaluate_grid([&](double x) { return im.strong(x); }, xs, workers);
        } else if (regime == "equipartition") {
            values = evaluate_grid([&](double x) { return im.equipartition(x); }, xs, workers);
        } else {
            values = evaluate_grid([&](double x) { return im.random_reference(x); }, xs, workers);
        }
    }

    double norm = 1.0;
    if (config.normalize == "reference") {
        norm = reference_normalization(s);
        if (!(norm > 0.0)) {
            throw ConfigError("normalize", "reference image vanishes at the target; use normalize = none");
        }
        for (double& v : values) {
            v /= norm;
        }
    }

    ImageProfile p;
    p.x.reserve(xs.size());
    for (double x : xs) {
        p.x.push_back(x / s.length_unit);
    }
    p.value = std::move(values);
    p.metadata = {{"config", to_json(config)},
                  {"normalization", norm},
                  {"derived", detail::derived_metadata(s)},
                  {"warnings", warnings}};
    return p;
}

/// Incident-flux contribution over the grid; target independent, never
/// normalized.
inline ImageProfile run_incident_flux(const ScenarioConfig& config) {
    const Scenario s = resolve_scenario(config);
    const IncidentFlux flux(s.basis, s.coupling, s.scattering, s.ranges);
    const auto xs = uniform_grid(0.0, s.basis.geometry().width(), static_cast<std::size_t>(config.grid));
    ImageProfile p;
    p.value = evaluate_grid(flux, xs, static_cast<unsigned>(config.workers));
    for (double x : xs) {
        p.x.push_back(x / s.length_unit);
    }
    p.metadata = {{"config", to_json(config)}, {"normalization", 1.0}, {"derived", detail::derived_metadata(s)}};
    return p;
}

/// Column-oriented numeric table for the auxiliary subcommands.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> data;  ///< data[c][row]
    json metadata = json::object();

    std::size_t rows() const { return data.empty() ? 0 : data.front().size(); }
};

inline Table to_table(const ImageProfile& p) { return Table{{"x", "value"}, {p.x, p.value}, p.metadata}; }

/// Shortest text of v with 17 significant digits, locale independent.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

inline void write_csv(std::ostream& out, const Table& t) {
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
        out << (c ? "," : "") << t.columns[c];
    }
    out << '\n';
    for (std::size_t r = 0; r < t.rows(); ++r) {
        for (std::size_t c = 0; c < t.columns.size(); ++c) {
            out << (c ? "," : "") << format_double(t.data[c][r]);
        }
        out << '\n';
    }
}

inline json table_json(const Table& t) {
    json j = json::object();
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
        j[t.columns[c]] = t.data[c];
    }
    j["metadata"] = t.metadata;
    return j;
}

/// Writes `t` as csv or json to `path` ("-" or empty: stdout). IoError on
/// failure.
inline void emit(const Table& t, const std::string& format, const std::string& path) {
    if (format != "csv" && format != "json") {
        throw ConfigError("format", "expected csv or json");
    }
    auto write = [&](std::ostream& out) {
        if (format == "csv") {
            write_csv(out, t);
        } else {
            out << table_json(t).dump(2) << '\n';
        }
    };
    if (path.empty() || path == "-") {
        write(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    write(out);
    out.flush();
    if (!out) {
        throw IoError("failed writing '" + path + "'");
    }
}

inline void emit(const ImageProfile& p, const std::string& format, const std::string& path) {
    emit(to_table(p), format, path);
}

/// Reads a profile written by emit(..., "json", ...).
inline ImageProfile read_profile_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path + "'");
    }
    try {
        const json j = json::parse(in);
        return ImageProfile{j.at("x").get<std::vector<double>>(), j.at("value").get<std::vector<double>>(),
                            j.at("metadata")};
    } catch (const json::exception& e) {
        throw ConfigError("<root>", std::string("not a profile: ") + e.what());
    }
}

}  // namespace ghostguide
