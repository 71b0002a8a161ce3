#pragma once

// Parameter sweeps over the measurement pipeline, emitted as deterministic CSV.

#include <wmecs/config.hpp>

#include <json.hpp>

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace wmecs {

std::string_view library_version();

struct SweepAxis {
    std::string name;
    RangeSpec range;
};

/// Swept axes, outermost first. Axes a command knows but the plan omits take their value from
/// the config as a single point.
using SweepPlan = std::vector<SweepAxis>;

/// Parses one "--sweep" argument of the form "<name>=<range>".
SweepAxis parse_sweep_axis(std::string_view text);

struct SweepResult {
    std::vector<std::string> header;
    std::vector<std::vector<std::optional<double>>> rows;  // nullopt -> "NA"
    nlohmann::json metadata;
    std::size_t truncation_warnings = 0;
    std::size_t degenerate_points = 0;
};

inline constexpr std::string_view kMissingValue = "NA";

/// Shortest round-trip decimal form of a finite double; "NA" otherwise.
std::string format_cell(std::optional<double> value);

void write_csv(std::ostream& out, const SweepResult& result);
std::string to_csv(const SweepResult& result);

struct SweepOptions {
    unsigned threads = 1;
};

/// Columns: s, theta, P_s with s1 = s2 = s and theta1 = theta2 = theta.
SweepResult cmd_probability(const WeakMeasurementConfig& config, const SweepPlan& plan,
                            const SweepOptions& options = {});
/// Columns: s1, s2, S2s_direct, S2s_normal.
SweepResult cmd_squeezing(const WeakMeasurementConfig& config, const SweepPlan& plan,
                          const SweepOptions& options = {});
/// Columns: re_gamma, re_beta, P_J. Metadata carries the grid minimum.
SweepResult cmd_wigner(const WeakMeasurementConfig& config, const SweepPlan& plan,
                       const SweepOptions& options = {});
/// Columns: s1, s2, E, entangled_flag.
SweepResult cmd_hz(const WeakMeasurementConfig& config, const SweepPlan& plan, const SweepOptions& options = {});
/// Columns: r, s, Q_fi, delta_phi, Q_fi_alt (the other gauge, reported only when it differs by
/// more than 1e-3 relative). delta_phi is NA when Q_fi < 1e-12.
SweepResult cmd_qcrb(const WeakMeasurementConfig& config, const SweepPlan& plan, const SweepOptions& options = {});

/// Default Wigner cross-section window used when the plan does not sweep re_gamma / re_beta.
inline constexpr double kWignerWindow = 2.5;
inline constexpr int kWignerPoints = 51;

} // namespace wmecs
