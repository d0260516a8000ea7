// qds: security bounds, sweeps, amplitude optimization, figure tables and
// simulation campaigns for the coherent-state signature scheme.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cvqds/campaign.hpp"
#include "cvqds/error.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumeric = 2;
constexpr int kExitViolation = 3;

struct Options {
    std::string config_path;
    std::vector<double> t;
    std::vector<double> km;
    std::vector<double> xi;
    std::vector<int> n;
    std::string alpha;
    std::optional<double> eps_fail;
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> trials;
    std::optional<std::int64_t> length;
    std::optional<std::int64_t> positions;
    std::string scaling;
    std::string out;
    std::string figure;
};

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("--config", o.config_path, "flat key = value config file");
    cmd->add_option("--T", o.t, "channel transmission(s)")->delimiter(',');
    cmd->add_option("--km", o.km, "fiber length(s) in km at 0.2 dB/km")->delimiter(',');
    cmd->add_option("--xi", o.xi, "excess noise value(s), e.g. 0.02 for 2%")->delimiter(',');
    cmd->add_option("--N", o.n, "alphabet size(s)")->delimiter(',');
    cmd->add_option("--alpha", o.alpha, "amplitude: value, list, min:max:step or optimize");
    cmd->add_option("--eps-fail", o.eps_fail, "target failure probability (default 1e-4)");
    cmd->add_option("--scaling", o.scaling, "outcome scaling: paper (default) or physical");
    cmd->add_option("--out", o.out, "output file (default: stdout)");
}

// Config file first, then command-line values on top.
cvqds::SweepConfig build_config(const Options& o) {
    cvqds::SweepConfig c;
    if (!o.config_path.empty()) c = cvqds::load_config(o.config_path);
    std::ostringstream overrides;
    const auto join = [](const auto& values) {
        std::ostringstream s;
        for (std::size_t i = 0; i < values.size(); ++i) s << (i ? "," : "") << values[i];
        return s.str();
    };
    overrides.precision(17);
    if (!o.t.empty()) overrides << "T = " << join(o.t) << '\n';
    if (!o.km.empty()) overrides << "km = " << join(o.km) << '\n';
    if (!o.xi.empty()) overrides << "xi = " << join(o.xi) << '\n';
    if (!o.n.empty()) overrides << "N = " << join(o.n) << '\n';
    if (!o.alpha.empty()) overrides << "alpha = " << o.alpha << '\n';
    if (o.eps_fail) overrides << "eps_fail = " << *o.eps_fail << '\n';
    if (!o.scaling.empty()) overrides << "scaling = " << o.scaling << '\n';
    if (o.seed) overrides << "seed = " << *o.seed << '\n';
    if (o.trials) overrides << "trials = " << *o.trials << '\n';
    if (o.length) overrides << "length = " << *o.length << '\n';
    if (o.positions) overrides << "positions = " << *o.positions << '\n';
    if (!o.out.empty()) overrides << "out = " << o.out << '\n';

    std::istringstream in(overrides.str());
    const cvqds::SweepConfig cli = cvqds::parse_config(in);
    if (!o.t.empty() || !o.km.empty()) {
        c.transmissions = cli.transmissions;
        c.fiber_km = cli.fiber_km;
    }
    if (!o.xi.empty()) c.excess_noise = cli.excess_noise;
    if (!o.n.empty()) c.alphabet_sizes = cli.alphabet_sizes;
    if (!o.alpha.empty()) c.alpha = cli.alpha;
    if (o.eps_fail) c.eps_fail = cli.eps_fail;
    if (!o.scaling.empty()) c.scaling = cli.scaling;
    if (o.seed) c.seed = cli.seed;
    if (o.trials) c.trials = cli.trials;
    if (o.length) c.length = cli.length;
    if (o.positions) c.positions = cli.positions;
    if (!o.out.empty()) c.output = cli.output;
    return c;
}

// Writes through `emit` to the configured file, or stdout.
template <typename Emit>
void write_output(const std::string& path, Emit emit) {
    if (path.empty()) {
        emit(std::cout);
        return;
    }
    std::ofstream out(path);
    if (!out) throw cvqds::IoError("cannot write '" + path + "'");
    emit(out);
    if (!out) throw cvqds::IoError("write to '" + path + "' failed");
}

double single(const std::vector<double>& values, const char* what) {
    if (values.size() != 1) throw cvqds::ConfigError(std::string("expected exactly one ") + what + " value");
    return values.front();
}

int run_bound(const cvqds::SweepConfig& c) {
    c.validate();
    if (c.alpha.optimize) throw cvqds::ConfigError("bound needs a fixed --alpha; use optimize instead");
    write_output(c.output, [&](std::ostream& out) { cvqds::write_sweep_csv(out, cvqds::sweep(c)); });
    return kExitOk;
}

int run_sweep(const cvqds::SweepConfig& c) {
    write_output(c.output, [&](std::ostream& out) { cvqds::write_sweep_csv(out, cvqds::sweep(c)); });
    return kExitOk;
}

int run_optimize(const cvqds::SweepConfig& c) {
    c.validate();
    write_output(c.output, [&](std::ostream& out) {
        out << "T,xi,N,alpha_opt,g_max,L_min,coarse_alpha,coarse_g\n";
        out.precision(17);
        for (double t : c.channel_transmissions()) {
            for (double xi : c.excess_noise) {
                for (int n : c.alphabet_sizes) {
                    const auto o = cvqds::optimize_alpha(t, xi, n, c.eps_fail, c.scaling);
                    out << t << ',' << xi << ',' << n << ',';
                    if (o.secure) {
                        out << o.alpha << ',' << o.g_max << ',' << o.length;
                    } else {
                        out << "nan,nan,inf";
                    }
                    out << ',' << o.coarse_alpha << ',' << o.coarse_g << '\n';
                }
            }
        }
    });
    return kExitOk;
}

int run_figure(const std::string& name, const cvqds::SweepConfig& c, const Options& o) {
    const cvqds::Figure figure = cvqds::parse_figure(name);
    auto fc = cvqds::FigureConfig::defaults(figure);
    if (!o.t.empty() || !o.km.empty()) fc.transmissions = c.channel_transmissions();
    if (!o.xi.empty()) fc.excess_noise = c.excess_noise;
    if (!o.n.empty()) fc.alphabet_sizes = c.alphabet_sizes;
    if (!o.alpha.empty()) {
        if (c.alpha.optimize) throw cvqds::ConfigError("figure takes an amplitude grid, not optimize");
        fc.alphas = c.alpha.values();
    }
    fc.eps_fail = c.eps_fail;
    fc.scaling = c.scaling;
    const cvqds::Table table = cvqds::figure_data(figure, fc);
    write_output(c.output, [&](std::ostream& out) { cvqds::write_table_csv(out, table); });
    return kExitOk;
}

int run_simulate(const cvqds::SweepConfig& c) {
    c.validate();
    if (c.alpha.optimize) throw cvqds::ConfigError("simulate needs a fixed --alpha");
    cvqds::SimulationConfig s;
    s.transmission = single(c.channel_transmissions(), "T");
    s.excess_noise = single(c.excess_noise, "xi");
    if (c.alphabet_sizes.size() != 1) throw cvqds::ConfigError("expected exactly one N value");
    s.alphabet_size = c.alphabet_sizes.front();
    s.alpha = single(c.alpha.values(), "alpha");
    s.eps_fail = c.eps_fail;
    s.scaling = c.scaling;
    s.length = c.length;
    s.trials = c.trials;
    s.positions = c.positions;
    s.seed = c.seed;
    const cvqds::SimulationReport report = cvqds::run_simulation(s);
    write_output(c.output, [&](std::ostream& out) { out << cvqds::report_json(report); });
    return report.all_pass() ? kExitOk : kExitViolation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coherent-state quantum digital signatures: bounds, sweeps and simulations"};
    app.require_subcommand(1);
    Options o;

    auto* bound = app.add_subcommand("bound", "analyze a single parameter point");
    add_common(bound, o);
    auto* sweep = app.add_subcommand("sweep", "tabulate the analysis over a parameter grid");
    add_common(sweep, o);
    auto* optimize = app.add_subcommand("optimize", "find the amplitude minimizing L");
    add_common(optimize, o);
    auto* figure = app.add_subcommand("figure", "emit the data table of fig6, fig7 or fig8");
    add_common(figure, o);
    figure->add_option("name", o.figure, "fig6, fig7 or fig8")->required();
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo campaigns checked against the bounds");
    add_common(simulate, o);
    simulate->add_option("--seed", o.seed, "random seed");
    simulate->add_option("--trials", o.trials, "protocol runs per campaign");
    simulate->add_option("--length", o.length, "signature length (default: from the analysis)");
    simulate->add_option("--positions", o.positions, "positions for the forger campaign");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        cvqds::SweepConfig c = build_config(o);
        if (*bound) return run_bound(c);
        if (*sweep) return run_sweep(c);
        if (*optimize) return run_optimize(c);
        if (*figure) return run_figure(o.figure, c, o);
        if (*simulate) return run_simulate(c);
    } catch (const cvqds::ConfigError& e) {
        std::cerr << "qds: " << e.what() << '\n';
        return kExitUsage;
    } catch (const cvqds::InvalidArgument& e) {
        std::cerr << "qds: " << e.what() << '\n';
        return kExitUsage;
    } catch (const cvqds::IoError& e) {
        std::cerr << "qds: " << e.what() << '\n';
        return kExitUsage;
    } catch (const cvqds::NoSecurity& e) {
        std::cerr << "qds: " << e.what() << '\n';
        return kExitUsage;
    } catch (const cvqds::Error& e) {
        std::cerr << "qds: numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    }
    return kExitUsage;
}
