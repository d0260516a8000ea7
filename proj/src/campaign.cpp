#include "cvqds/campaign.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "cvqds/error.hpp"
#include "cvqds/protocol_sim.hpp"

namespace cvqds {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

// Accepts "inf", "-inf" and "nan" as well as ordinary numbers.
double parse_double(const std::string& s) {
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    if (s == "nan") return kNaN;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        throw ConfigError("not a number: '" + s + "'");
    }
    return value;
}

template <typename Int>
Int parse_integer(const std::string& s) {
    Int value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        throw ConfigError("not an integer: '" + s + "'");
    }
    return value;
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string format_length(std::int64_t length) {
    return length == SecurityResult::kInsecureLength ? "inf" : std::to_string(length);
}

std::int64_t parse_length(const std::string& s) {
    return s == "inf" ? SecurityResult::kInsecureLength : parse_integer<std::int64_t>(s);
}

OutcomeScaling parse_scaling(const std::string& s) {
    if (s == "paper") return OutcomeScaling::kPaper;
    if (s == "physical") return OutcomeScaling::kPhysical;
    throw ConfigError("scaling must be 'paper' or 'physical', got '" + s + "'");
}

const char* scaling_name(OutcomeScaling s) {
    return s == OutcomeScaling::kPaper ? "paper" : "physical";
}

AlphaGrid parse_alpha(const std::string& s) {
    AlphaGrid grid;
    if (s == "optimize") {
        grid.optimize = true;
        return grid;
    }
    if (s.find(':') != std::string::npos) {
        const auto parts = split(s, ':');
        if (parts.size() != 3) throw ConfigError("alpha range must be min:max:step");
        grid.min = parse_double(parts[0]);
        grid.max = parse_double(parts[1]);
        grid.step = parse_double(parts[2]);
        return grid;
    }
    // A list: represent it as a degenerate grid when it has one value,
    // otherwise require equal spacing.
    std::vector<double> values;
    for (const auto& p : split(s, ',')) values.push_back(parse_double(p));
    grid.min = values.front();
    grid.max = values.back();
    grid.step = values.size() > 1 ? values[1] - values[0] : 1.0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        const double expected = grid.min + static_cast<double>(i) * grid.step;
        if (std::abs(values[i] - expected) > 1e-9) {
            throw ConfigError("alpha list must be evenly spaced; use min:max:step");
        }
    }
    return grid;
}

}  // namespace

double fiber_transmission(double km, double loss_db_per_km) {
    if (!(km >= 0.0)) throw InvalidArgument("fiber length must be >= 0");
    if (!(loss_db_per_km >= 0.0)) throw InvalidArgument("fiber loss must be >= 0");
    return std::pow(10.0, -loss_db_per_km * km / 10.0);
}

std::vector<double> AlphaGrid::values() const {
    if (!(min > 0.0) || !(max >= min) || !(step > 0.0)) {
        throw ConfigError("alpha grid needs 0 < min <= max and step > 0");
    }
    const auto count = static_cast<std::int64_t>(std::floor((max - min) / step + 1e-9)) + 1;
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    for (std::int64_t i = 0; i < count; ++i) out.push_back(min + static_cast<double>(i) * step);
    return out;
}

std::vector<double> SweepConfig::channel_transmissions() const {
    std::vector<double> out = transmissions;
    for (double km : fiber_km) out.push_back(fiber_transmission(km, loss_db_per_km));
    return out;
}

void SweepConfig::validate() const {
    if (transmissions.empty() && fiber_km.empty()) throw ConfigError("no T or km values given");
    for (double t : transmissions) {
        if (!(t > 0.0 && t <= 1.0)) throw ConfigError("T values must lie in (0, 1]");
    }
    for (double km : fiber_km) {
        if (!(km >= 0.0)) throw ConfigError("km values must be >= 0");
    }
    if (excess_noise.empty()) throw ConfigError("no xi values given");
    for (double xi : excess_noise) {
        if (!(xi >= 0.0)) throw ConfigError("xi values must be >= 0");
    }
    if (alphabet_sizes.empty()) throw ConfigError("no N values given");
    for (int n : alphabet_sizes) {
        if (n < 2 || n > 64 || n % 2 != 0) throw ConfigError("N values must be even, 2..64");
    }
    if (!alpha.optimize) alpha.values();
    if (!(eps_fail > 0.0 && eps_fail < 1.0)) throw ConfigError("eps_fail must lie in (0, 1)");
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (positions < 1) throw ConfigError("positions must be >= 1");
    if (length < 0 || length % 2 != 0) throw ConfigError("length must be even (0 for automatic)");
}

SweepConfig parse_config(std::istream& in) {
    SweepConfig config;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(number) + ": expected key = value");
        }
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        try {
            const auto doubles = [&] {
                std::vector<double> out;
                for (const auto& p : split(value, ',')) out.push_back(parse_double(p));
                return out;
            };
            if (key == "T") {
                config.transmissions = doubles();
            } else if (key == "km") {
                config.fiber_km = doubles();
            } else if (key == "loss_db_per_km") {
                config.loss_db_per_km = parse_double(value);
            } else if (key == "xi") {
                config.excess_noise = doubles();
            } else if (key == "N") {
                config.alphabet_sizes.clear();
                for (const auto& p : split(value, ',')) config.alphabet_sizes.push_back(parse_integer<int>(p));
            } else if (key == "alpha") {
                config.alpha = parse_alpha(value);
            } else if (key == "eps_fail") {
                config.eps_fail = parse_double(value);
            } else if (key == "scaling") {
                config.scaling = parse_scaling(value);
            } else if (key == "out") {
                config.output = value;
            } else if (key == "seed") {
                config.seed = parse_integer<std::uint64_t>(value);
            } else if (key == "trials") {
                config.trials = parse_integer<std::int64_t>(value);
            } else if (key == "length") {
                config.length = parse_integer<std::int64_t>(value);
            } else if (key == "positions") {
                config.positions = parse_integer<std::int64_t>(value);
            } else {
                throw ConfigError("unknown key '" + key + "'");
            }
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(number) + ": " + e.what());
        }
    }
    return config;
}

SweepConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    return parse_config(in);
}

SweepRow make_row(double transmission, double excess_noise, int alphabet_size, double alpha,
                  const SecurityResult& result) {
    SweepRow row;
    row.transmission = transmission;
    row.excess_noise = excess_noise;
    row.alphabet_size = alphabet_size;
    row.alpha = alpha;
    row.p_err = result.p_err;
    row.chi = result.chi;
    row.p_e = result.p_e;
    row.gap = result.gap;
    row.s_b = result.secure() ? result.thresholds.s_b : kNaN;
    row.s_c = result.secure() ? result.thresholds.s_c : kNaN;
    row.length = result.length;
    return row;
}

SweepRow evaluate_point(double transmission, double excess_noise, int alphabet_size, double alpha,
                        double eps_fail, OutcomeScaling scaling) {
    const Channel channel = Channel::from_excess_noise(transmission, excess_noise, scaling);
    const SecurityResult result = analyze(channel, Alphabet(alphabet_size, alpha), eps_fail);
    return make_row(transmission, excess_noise, alphabet_size, alpha, result);
}

AlphaOptimum optimize_alpha(double transmission, double excess_noise, int alphabet_size,
                            double eps_fail, OutcomeScaling scaling, const AlphaGrid& grid) {
    const auto eval = [&](double a) {
        return evaluate_point(transmission, excess_noise, alphabet_size, a, eps_fail, scaling);
    };
    const std::vector<double> coarse = grid.values();
    std::vector<SweepRow> rows;
    rows.reserve(coarse.size());
    std::size_t best = 0;
    for (std::size_t i = 0; i < coarse.size(); ++i) {
        rows.push_back(eval(coarse[i]));
        if (rows[i].gap > rows[best].gap) best = i;
    }

    AlphaOptimum opt;
    opt.coarse_alpha = coarse[best];
    opt.coarse_g = rows[best].gap;
    SweepRow top = rows[best];

    if (coarse.size() >= 2) {
        double lo = coarse[best == 0 ? 0 : best - 1];
        double hi = coarse[std::min(best + 1, coarse.size() - 1)];
        const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
        double x1 = hi - inv_phi * (hi - lo);
        double x2 = lo + inv_phi * (hi - lo);
        SweepRow r1 = eval(x1);
        SweepRow r2 = eval(x2);
        while (hi - lo > 1e-3) {
            if (r1.gap >= r2.gap) {
                hi = x2;
                x2 = x1;
                r2 = r1;
                x1 = hi - inv_phi * (hi - lo);
                r1 = eval(x1);
            } else {
                lo = x1;
                x1 = x2;
                r1 = r2;
                x2 = lo + inv_phi * (hi - lo);
                r2 = eval(x2);
            }
        }
        for (const SweepRow* r : {&r1, &r2}) {
            if (r->gap > top.gap) top = *r;
        }
    }

    opt.row = top;
    opt.alpha = top.alpha;
    opt.g_max = top.gap;
    opt.secure = top.secure();
    opt.length = top.length;
    return opt;
}

std::vector<SweepRow> sweep(const SweepConfig& config) {
    config.validate();
    std::vector<SweepRow> rows;
    const std::vector<double> alphas = config.alpha.optimize ? std::vector<double>{} : config.alpha.values();
    for (double t : config.channel_transmissions()) {
        for (double xi : config.excess_noise) {
            for (int n : config.alphabet_sizes) {
                if (config.alpha.optimize) {
                    rows.push_back(optimize_alpha(t, xi, n, config.eps_fail, config.scaling).row);
                    continue;
                }
                for (double a : alphas) rows.push_back(evaluate_point(t, xi, n, a, config.eps_fail, config.scaling));
            }
        }
    }
    return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << kSweepHeader << '\n';
    for (const auto& r : rows) {
        out << format_double(r.transmission) << ',' << format_double(r.excess_noise) << ','
            << r.alphabet_size << ',' << format_double(r.alpha) << ',' << format_double(r.p_err) << ','
            << format_double(r.chi) << ',' << format_double(r.p_e) << ',' << format_double(r.gap) << ','
            << format_double(r.s_b) << ',' << format_double(r.s_c) << ',' << format_length(r.length)
            << '\n';
    }
}

std::vector<SweepRow> read_sweep_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != kSweepHeader) {
        throw ConfigError("sweep CSV must start with the header " + std::string(kSweepHeader));
    }
    std::vector<SweepRow> rows;
    int number = 1;
    while (std::getline(in, line)) {
        ++number;
        if (trim(line).empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 11) throw ConfigError("sweep CSV line " + std::to_string(number) + ": expected 11 fields");
        SweepRow r;
        r.transmission = parse_double(f[0]);
        r.excess_noise = parse_double(f[1]);
        r.alphabet_size = parse_integer<int>(f[2]);
        r.alpha = parse_double(f[3]);
        r.p_err = parse_double(f[4]);
        r.chi = parse_double(f[5]);
        r.p_e = parse_double(f[6]);
        r.gap = parse_double(f[7]);
        r.s_b = parse_double(f[8]);
        r.s_c = parse_double(f[9]);
        r.length = parse_length(f[10]);
        rows.push_back(r);
    }
    return rows;
}

void save_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    write_sweep_csv(out, rows);
    if (!out) throw IoError("write to '" + path + "' failed");
}

Figure parse_figure(std::string_view name) {
    if (name == "fig6") return Figure::kFig6;
    if (name == "fig7") return Figure::kFig7;
    if (name == "fig8") return Figure::kFig8;
    throw ConfigError("unknown figure '" + std::string(name) + "' (expected fig6, fig7 or fig8)");
}

FigureConfig FigureConfig::defaults(Figure figure) {
    FigureConfig c;
    switch (figure) {
        case Figure::kFig6:
            c.transmissions = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
            c.excess_noise = {0.0, 0.02};
            c.alphas = {0.5, 1.0};
            c.alphabet_sizes = {4};
            break;
        case Figure::kFig7:
            c.transmissions = {0.61, 0.47, 0.19, 0.11, 0.01};
            c.excess_noise = {0.0, 0.01};
            c.alphas = AlphaGrid{0.05, 2.0, 0.05, false}.values();
            c.alphabet_sizes = {4};
            break;
        case Figure::kFig8:
            c.transmissions = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
            c.excess_noise = {0.0};
            c.alphabet_sizes = {2, 4, 6, 8};
            break;
    }
    return c;
}

Table figure_data(Figure figure, const FigureConfig& config) {
    Table table;
    switch (figure) {
        case Figure::kFig6:
            table.columns = {"alpha", "xi", "T", "L"};
            for (double a : config.alphas) {
                for (double xi : config.excess_noise) {
                    for (double t : config.transmissions) {
                        const SweepRow r = evaluate_point(t, xi, 4, a, config.eps_fail, config.scaling);
                        table.rows.push_back({a, xi, t, r.secure() ? static_cast<double>(r.length) : kInf});
                    }
                }
            }
            break;
        case Figure::kFig7:
            table.columns = {"T", "xi", "alpha", "g"};
            for (double t : config.transmissions) {
                for (double xi : config.excess_noise) {
                    for (double a : config.alphas) {
                        const SweepRow r = evaluate_point(t, xi, 4, a, config.eps_fail, config.scaling);
                        table.rows.push_back({t, xi, a, r.gap});
                    }
                }
            }
            break;
        case Figure::kFig8:
            table.columns = {"N", "T", "alpha_opt", "g_max", "L_min"};
            for (int n : config.alphabet_sizes) {
                for (double t : config.transmissions) {
                    const AlphaOptimum o = optimize_alpha(t, 0.0, n, config.eps_fail, config.scaling);
                    table.rows.push_back({static_cast<double>(n), t, o.secure ? o.alpha : kNaN,
                                          o.secure ? o.g_max : kNaN,
                                          o.secure ? static_cast<double>(o.length) : kInf});
                }
            }
            break;
    }
    return table;
}

void write_table_csv(std::ostream& out, const Table& table) {
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        out << (i ? "," : "") << table.columns[i];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
        out << '\n';
    }
}

Table read_table_csv(std::istream& in) {
    Table table;
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty table");
    table.columns = split(line, ',');
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        std::vector<double> row;
        for (const auto& f : split(line, ',')) row.push_back(parse_double(f));
        if (row.size() != table.columns.size()) throw ConfigError("table row has the wrong width");
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::size_t column_index(const Table& table, const std::string& column) {
    const auto it = std::find(table.columns.begin(), table.columns.end(), column);
    if (it == table.columns.end()) throw InvalidArgument("no column '" + column + "'");
    return static_cast<std::size_t>(it - table.columns.begin());
}

std::vector<std::vector<double>> select_rows(const Table& table, const std::string& column, double value) {
    const std::size_t c = column_index(table, column);
    std::vector<std::vector<double>> out;
    for (const auto& row : table.rows) {
        if (row[c] == value) out.push_back(row);
    }
    return out;
}

bool SimulationReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const BoundCheck& c) { return c.pass; });
}

namespace {

BoundCheck upper_check(std::string name, double parameter, double bound, const FrequencyEstimate& est) {
    BoundCheck c;
    c.name = std::move(name);
    c.direction = "upper";
    c.parameter = parameter;
    c.bound = bound;
    c.empirical = est.frequency();
    c.standard_error = est.standard_error();
    c.trials = est.trials;
    c.slack = statistical_slack(bound, est.trials);
    c.pass = c.empirical <= bound + c.slack;
    return c;
}

}  // namespace

SimulationReport run_simulation(const SimulationConfig& config) {
    if (config.trials < 1 || config.positions < 1) throw ConfigError("trials and positions must be >= 1");
    SimulationReport report;
    report.config = config;
    const Channel channel = Channel::from_excess_noise(config.transmission, config.excess_noise, config.scaling);
    const Alphabet alphabet(config.alphabet_size, config.alpha);
    const SecurityResult result = analyze(channel, alphabet, config.eps_fail);
    report.analytic = make_row(config.transmission, config.excess_noise, config.alphabet_size, config.alpha, result);
    if (!result.secure()) throw NoSecurity("no positive security gap at this point; nothing to simulate");

    const std::int64_t length = config.length > 0 ? config.length : result.length;
    if (length % 2 != 0) throw ConfigError("simulation length must be even");
    report.length_used = length;
    const SimParams params{channel, alphabet, length, result.thresholds};
    const Thresholds& th = result.thresholds;

    // Sub-campaigns draw from separate seed streams.
    const std::uint64_t honest_seed = splitmix64(config.seed ^ 0x1);
    const std::uint64_t repudiation_seed = splitmix64(config.seed ^ 0x2);
    const std::uint64_t forger_seed = splitmix64(config.seed ^ 0x3);

    report.checks.push_back(upper_check("robustness", 0.0, eps_rob(th.s_b, result.p_err, length),
                                        simulate_honest(params, config.trials, honest_seed)));

    const double rep_bound = eps_rep(th.s_b, th.s_c, length);
    for (int i = 0; i <= 4; ++i) {
        const double rate = th.s_b + (th.s_c - th.s_b) * i / 4.0;
        const double f = flip_fraction_for_rate(rate, result.p_err);
        report.checks.push_back(upper_check("repudiation", f, rep_bound,
                                            simulate_repudiation(params, f, config.trials, repudiation_seed + i)));
    }

    if (channel.attack() == Attack::kBeamsplitter) {
        const FrequencyEstimate est = simulate_forger_ml(channel, alphabet, config.positions, forger_seed);
        BoundCheck c;
        c.name = "forgery";
        c.direction = "lower";
        c.bound = result.p_e;
        c.empirical = est.frequency();
        c.standard_error = est.standard_error();
        c.trials = est.trials;
        c.slack = statistical_slack(result.p_e, est.trials);
        c.pass = c.empirical >= c.bound - c.slack;
        report.checks.push_back(c);
    } else {
        report.notes.push_back("forger campaign skipped: the simulated forger taps a pure-loss channel only");
    }
    return report;
}

std::string report_json(const SimulationReport& report) {
    using nlohmann::ordered_json;
    const auto num = [](double x) -> ordered_json {
        if (std::isnan(x)) return "nan";
        if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
        return x;
    };
    const auto& c = report.config;
    const auto& a = report.analytic;
    ordered_json j;
    j["parameters"] = {{"T", c.transmission},   {"xi", c.excess_noise},   {"N", c.alphabet_size},
                       {"alpha", c.alpha},      {"eps_fail", c.eps_fail}, {"scaling", scaling_name(c.scaling)},
                       {"trials", c.trials},    {"positions", c.positions}, {"seed", c.seed}};
    j["analytic"] = {{"p_err", num(a.p_err)}, {"chi", num(a.chi)}, {"p_e", num(a.p_e)},
                     {"g", num(a.gap)},       {"s_B", num(a.s_b)}, {"s_C", num(a.s_c)},
                     {"L", format_length(a.length)}};
    j["length_used"] = report.length_used;
    ordered_json checks = ordered_json::array();
    for (const auto& ch : report.checks) {
        ordered_json entry = {{"name", ch.name}, {"direction", ch.direction}};
        if (ch.name == "repudiation") entry["flip_fraction"] = num(ch.parameter);
        entry["bound"] = num(ch.bound);
        entry["empirical"] = num(ch.empirical);
        entry["standard_error"] = num(ch.standard_error);
        entry["slack"] = num(ch.slack);
        entry["trials"] = ch.trials;
        entry["pass"] = ch.pass;
        checks.push_back(std::move(entry));
    }
    j["checks"] = checks;
    j["notes"] = report.notes;
    j["pass"] = report.all_pass();
    return j.dump(2) + "\n";
}

}  // namespace cvqds
