#pragma once

// Parameter sweeps, amplitude optimization, figure tables and simulation
// reports, plus the flat-file formats they are read from and written to.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "cvqds/channel_attacks.hpp"
#include "cvqds/security_bounds.hpp"

namespace cvqds {

/// T = 10^(-loss * km / 10). Requires km >= 0 and loss >= 0.
double fiber_transmission(double km, double loss_db_per_km = 0.2);

/// Inclusive grid min, min + step, ... <= max (with 1e-9 step slack), or a
/// request to optimize instead.
struct AlphaGrid {
    double min = 0.05;
    double max = 3.0;
    double step = 0.05;
    bool optimize = false;

    std::vector<double> values() const;
};

struct SweepConfig {
    std::vector<double> transmissions;
    /// Converted with fiber_transmission and appended after `transmissions`.
    std::vector<double> fiber_km;
    double loss_db_per_km = 0.2;
    std::vector<double> excess_noise{0.0};
    std::vector<int> alphabet_sizes{4};
    AlphaGrid alpha;
    double eps_fail = 1e-4;
    OutcomeScaling scaling = OutcomeScaling::kPaper;
    std::string output;

    // Used by simulation campaigns only.
    std::uint64_t seed = 1;
    std::int64_t trials = 1000;
    /// Signature length for simulations; 0 takes L from the analysis.
    std::int64_t length = 0;
    /// Positions for the forger campaign.
    std::int64_t positions = 100000;

    std::vector<double> channel_transmissions() const;
    /// Throws ConfigError on empty lists or out-of-range values.
    void validate() const;
};

/// Flat `key = value` text; `#` starts a comment. Lists are comma separated.
/// Keys: T, km, loss_db_per_km, xi, N, alpha (value, list, min:max:step or
/// "optimize"), eps_fail, scaling (paper|physical), out, seed, trials,
/// length, positions. Throws ConfigError naming the offending line.
SweepConfig parse_config(std::istream& in);
SweepConfig load_config(const std::string& path);

struct SweepRow {
    double transmission = 0.0;
    double excess_noise = 0.0;
    int alphabet_size = 4;
    double alpha = 0.0;
    double p_err = 0.0;
    double chi = 0.0;
    double p_e = 0.0;
    double gap = 0.0;
    /// NaN at insecure points.
    double s_b = 0.0;
    double s_c = 0.0;
    /// SecurityResult::kInsecureLength at insecure points.
    std::int64_t length = 0;

    bool secure() const noexcept { return length != SecurityResult::kInsecureLength; }
};

SweepRow make_row(double transmission, double excess_noise, int alphabet_size, double alpha,
                  const SecurityResult& result);

SweepRow evaluate_point(double transmission, double excess_noise, int alphabet_size, double alpha,
                        double eps_fail, OutcomeScaling scaling = OutcomeScaling::kPaper);

struct AlphaOptimum {
    bool secure = false;
    double alpha = 0.0;
    double g_max = 0.0;
    std::int64_t length = SecurityResult::kInsecureLength;
    /// Best point of the coarse grid; g_max never falls below coarse_g.
    double coarse_alpha = 0.0;
    double coarse_g = 0.0;
    SweepRow row;
};

/// Coarse grid over `grid`, then golden-section search on the bracket around
/// the best grid point until it is narrower than 1e-3, maximizing the gap.
AlphaOptimum optimize_alpha(double transmission, double excess_noise, int alphabet_size,
                            double eps_fail, OutcomeScaling scaling = OutcomeScaling::kPaper,
                            const AlphaGrid& grid = {});

/// One row per (T, xi, N, alpha) in that nesting order, or one optimized row
/// per (T, xi, N) when the alpha grid asks for optimization.
std::vector<SweepRow> sweep(const SweepConfig& config);

inline constexpr std::string_view kSweepHeader = "T,xi,N,alpha,p_err,chi,p_e,g,s_B,s_C,L";

/// Doubles are written with 17 significant digits so reading back is exact.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
std::vector<SweepRow> read_sweep_csv(std::istream& in);
void save_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows);

enum class Figure { kFig6, kFig7, kFig8 };

/// "fig6", "fig7" or "fig8". Throws ConfigError otherwise.
Figure parse_figure(std::string_view name);

struct FigureConfig {
    std::vector<double> transmissions;
    std::vector<double> excess_noise;
    std::vector<double> alphas;
    std::vector<int> alphabet_sizes;
    double eps_fail = 1e-4;
    OutcomeScaling scaling = OutcomeScaling::kPaper;

    static FigureConfig defaults(Figure figure);
};

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

/// fig6: alpha, xi, T, L with L = inf when insecure.
/// fig7: T, xi, alpha, g.
/// fig8: N, T, alpha_opt, g_max, L_min at xi = 0 (alpha_opt, g_max NaN and
/// L_min inf where no amplitude is secure).
Table figure_data(Figure figure, const FigureConfig& config);

void write_table_csv(std::ostream& out, const Table& table);
Table read_table_csv(std::istream& in);

/// Rows of `table` whose column `column` equals `value`.
std::vector<std::vector<double>> select_rows(const Table& table, const std::string& column, double value);
std::size_t column_index(const Table& table, const std::string& column);

struct SimulationConfig {
    double transmission = 0.5;
    double excess_noise = 0.0;
    int alphabet_size = 4;
    double alpha = 1.0;
    double eps_fail = 1e-4;
    OutcomeScaling scaling = OutcomeScaling::kPaper;
    std::int64_t length = 0;
    std::int64_t trials = 1000;
    std::int64_t positions = 100000;
    std::uint64_t seed = 1;
};

struct BoundCheck {
    std::string name;
    /// "upper": empirical <= bound + slack. "lower": empirical >= bound - slack.
    std::string direction;
    double parameter = 0.0;
    double bound = 0.0;
    double empirical = 0.0;
    double standard_error = 0.0;
    double slack = 0.0;
    std::int64_t trials = 0;
    bool pass = false;
};

struct SimulationReport {
    SimulationConfig config;
    SweepRow analytic;
    std::int64_t length_used = 0;
    std::vector<BoundCheck> checks;
    std::vector<std::string> notes;

    bool all_pass() const;
};

/// Honest, repudiation (antipodal flips sweeping the induced mismatch rate
/// across [s_B, s_C]) and, on pure-loss channels, forger campaigns, each
/// compared with its analytic bound. Throws NoSecurity at insecure points.
SimulationReport run_simulation(const SimulationConfig& config);

/// Deterministic JSON rendering of a report.
std::string report_json(const SimulationReport& report);

}  // namespace cvqds
