// ghostguide: config-driven ghost-imaging profiles for a randomly perturbed
// waveguide.
//
//   ghostguide image --config scene.json --out image.csv
//   ghostguide image --config scene.json --regime weak --format json
//   ghostguide modes|coupling|phi|transport|incident-flux --config scene.json
//
// Exit codes: 0 success, 2 configuration or domain error, 3 I/O error.

#include <cmath>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ghostguide/ghostguide.hpp"

namespace gg = ghostguide;

namespace {

struct Options {
    std::string config;
    std::string out = "-";
    std::string format = "csv";
    std::optional<std::string> regime;
    std::optional<int> grid;
    std::optional<std::string> normalize;
    std::optional<int> workers;
    int order = 0;
    double center = 0.5;
    std::optional<double> range;
};

gg::ScenarioConfig load(const Options& o) {
    gg::ScenarioConfig c = o.config.empty() ? gg::parse_config(gg::json::object()) : gg::load_config(o.config);
    // flags override the file; reparse so the same validation applies
    gg::json j = gg::to_json(c);
    if (o.regime) j["regime"] = *o.regime;
    if (o.grid) j["grid"] = *o.grid;
    if (o.normalize) j["normalize"] = *o.normalize;
    if (o.workers) j["workers"] = *o.workers;
    return gg::parse_config(j);
}

gg::Table modes_table(const gg::Scenario& s) {
    gg::Table t{{"j", "beta", "beta_prime"}, {{}, {}, {}}, {}};
    for (int j = 0; j < s.basis.size(); ++j) {
        t.data[0].push_back(j + 1);
        t.data[1].push_back(s.basis.beta()(j));
        t.data[2].push_back(s.basis.beta_prime()(j));
    }
    return t;
}

gg::Table coupling_table(const gg::Scenario& s) {
    gg::Table t{{"j", "k", "S", "D"}, {{}, {}, {}, {}}, {}};
    const int n = s.basis.size();
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            t.data[0].push_back(j + 1);
            t.data[1].push_back(k + 1);
            t.data[2].push_back(s.coupling.S(j, k));
            t.data[3].push_back(s.coupling.D(j, k));
        }
    }
    t.metadata["C_D"] = s.coupling.C_D;
    t.metadata["C_S"] = s.coupling.C_S;
    return t;
}

// Phi_n(x, x0) against its Bessel approximation; x0 = center * X.
gg::Table phi_table(const gg::Scenario& s, int order, double center) {
    if (!(center > 0.0 && center < 1.0)) {
        throw gg::ConfigError("center", "must lie strictly inside (0, 1)");
    }
    const double X = s.basis.geometry().width();
    const double x0 = center * X;
    const gg::PhiKernel phi(s.basis, order);
    const auto xs = gg::uniform_grid(0.0, X, static_cast<std::size_t>(s.config.grid));
    gg::Table t{{"x", "value", "bessel"}, {{}, {}, {}}, {}};
    for (double x : xs) {
        t.data[0].push_back(x / s.length_unit);
        t.data[1].push_back(phi(x, x0));
        t.data[2].push_back(order <= 1 ? gg::phi_bessel_approx(order, x - x0, s.basis.geometry()) : std::nan(""));
    }
    t.metadata["order"] = order;
    t.metadata["center"] = center;
    return t;
}

gg::Table transport_table(const gg::Scenario& s, double L) {
    const auto w = gg::wigner_integrals(s.scattering, L);
    const auto inc = gg::incoherent_transfer(s.scattering, L);
    gg::Table t{{"j", "k", "gamma", "transfer", "incoherent"}, {{}, {}, {}, {}, {}}, {}};
    const int n = s.basis.size();
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            t.data[0].push_back(j + 1);
            t.data[1].push_back(k + 1);
            t.data[2].push_back(s.scattering.gamma(j, k) * s.length_unit);
            t.data[3].push_back(w(j, k));
            t.data[4].push_back(inc(j, k));
        }
    }
    t.metadata["L"] = L / s.length_unit;
    if (std::isfinite(s.scattering.L_eq)) {
        t.metadata["L_eq"] = s.scattering.L_eq / s.length_unit;
    }
    return t;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ghost-imaging functions of a randomly perturbed acoustic waveguide"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "Scenario file (JSON)");
        sub->add_option("--out", o.out, "Output path, '-' for stdout");
        sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--grid", o.grid, "Cross-range grid size (default 512)");
        sub->add_option("--workers", o.workers, "Threads for grid evaluation");
    };

    auto* modes = app.add_subcommand("modes", "Propagating mode wavenumbers and slownesses");
    auto* coupling = app.add_subcommand("coupling", "Source and detector coupling matrices S, D");
    auto* phi = app.add_subcommand("phi", "Mode sum Phi_n(x, x0) and its Bessel approximation");
    auto* transport = app.add_subcommand("transport", "Generator, mean power transfer and incoherent transfer");
    auto* image = app.add_subcommand("image", "Imaging function over the cross-range grid");
    auto* flux = app.add_subcommand("incident-flux", "Incident-flux contribution over the cross-range grid");
    for (auto* sub : {modes, coupling, phi, transport, image, flux}) {
        common(sub);
    }
    phi->add_option("--order", o.order, "n in {-1, 0, 1, 2}")->check(CLI::Range(-1, 2));
    phi->add_option("--center", o.center, "x0 as a fraction of the width");
    transport->add_option("--range", o.range, "Range L in config length units (default ranges.L)");
    image->add_option("--regime", o.regime, "Imaging regime");
    image->add_option("--normalize", o.normalize, "reference or none");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        const gg::ScenarioConfig config = load(o);
        if (image->parsed()) {
            gg::emit(gg::run_scenario(config), o.format, o.out);
            return 0;
        }
        if (flux->parsed()) {
            gg::emit(gg::run_incident_flux(config), o.format, o.out);
            return 0;
        }
        const gg::Scenario s = gg::resolve_scenario(config);
        gg::Table t;
        if (modes->parsed()) {
            t = modes_table(s);
        } else if (coupling->parsed()) {
            t = coupling_table(s);
        } else if (phi->parsed()) {
            t = phi_table(s, o.order, o.center);
        } else {
            const double L = o.range ? *o.range * s.length_unit : s.ranges.L;
            if (!(L >= 0.0)) {
                throw gg::ConfigError("range", "must be non-negative");
            }
            t = transport_table(s, L);
        }
        t.metadata["config"] = gg::to_json(config);
        gg::emit(t, o.format, o.out);
        return 0;
    } catch (const gg::IoError& e) {
        std::cerr << "ghostguide: " << e.what() << '\n';
        return 3;
    } catch (const gg::Error& e) {
        std::cerr << "ghostguide: " << e.what() << '\n';
        return 2;
    }
}
