#include <wmecs/sweep.hpp>

#include <wmecs/measurement.hpp>
#include <wmecs/observables.hpp>
#include <wmecs/parallel.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace wmecs {

namespace {

constexpr double kQfiFloor = 1e-12;
constexpr double kGaugeReportThreshold = 1e-3;

using Point = std::map<std::string, double, std::less<>>;

struct RowOutcome {
    std::vector<std::optional<double>> observables;
    bool degenerate = false;
};

using RowEvaluator = std::function<RowOutcome(const Point&, WarningSink&)>;

struct CommandSpec {
    std::string name;
    std::vector<std::string> axis_columns;  // output order of the swept parameters
    std::vector<double> axis_defaults;      // single value when the plan omits the axis
    std::vector<std::string> observable_columns;
};

struct Grid {
    std::vector<std::string> names;  // nesting order, outermost first
    std::vector<std::vector<double>> values;

    std::size_t size() const {
        std::size_t n = 1;
        for (const auto& v : values) n *= v.size();
        return n;
    }
    Point point(std::size_t flat) const {
        Point p;
        for (std::size_t k = names.size(); k-- > 0;) {
            const auto& axis = values[k];
            p[names[k]] = axis[flat % axis.size()];
            flat /= axis.size();
        }
        return p;
    }
};

Grid resolve(const CommandSpec& spec, const SweepPlan& plan) {
    Grid grid;
    std::set<std::string, std::less<>> seen;
    for (const auto& axis : plan) {
        const auto it = std::find(spec.axis_columns.begin(), spec.axis_columns.end(), axis.name);
        if (it == spec.axis_columns.end()) {
            std::string allowed;
            for (const auto& n : spec.axis_columns) allowed += (allowed.empty() ? "" : ", ") + n;
            throw ConfigError("command '" + spec.name + "' cannot sweep '" + axis.name + "' (allowed: " + allowed +
                              ")");
        }
        if (!seen.insert(axis.name).second) throw ConfigError("axis '" + axis.name + "' swept twice");
        grid.names.push_back(axis.name);
        grid.values.push_back(axis.range.values());
    }
    for (std::size_t k = 0; k < spec.axis_columns.size(); ++k) {
        if (seen.contains(spec.axis_columns[k])) continue;
        grid.names.push_back(spec.axis_columns[k]);
        grid.values.push_back({spec.axis_defaults[k]});
    }
    return grid;
}

nlohmann::json base_metadata(const std::string& command, const WeakMeasurementConfig& config) {
    return nlohmann::json{{"command", command}, {"config", to_json(config)}, {"version", std::string(library_version())}};
}

SweepResult run(const CommandSpec& spec, const WeakMeasurementConfig& config, const SweepPlan& plan,
                const SweepOptions& options, const RowEvaluator& evaluate) {
    config.validate();
    const Grid grid = resolve(spec, plan);
    const std::size_t count = grid.size();

    std::vector<RowOutcome> outcomes(count);
    std::vector<WarningSink> sinks(count);
    parallel_for(count, options.threads, [&](std::size_t i) { outcomes[i] = evaluate(grid.point(i), sinks[i]); });

    SweepResult result;
    result.header = spec.axis_columns;
    result.header.insert(result.header.end(), spec.observable_columns.begin(), spec.observable_columns.end());
    result.rows.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const Point p = grid.point(i);
        std::vector<std::optional<double>> row;
        for (const auto& name : spec.axis_columns) row.emplace_back(p.at(name));
        row.insert(row.end(), outcomes[i].observables.begin(), outcomes[i].observables.end());
        result.rows.push_back(std::move(row));
        result.truncation_warnings += sinks[i].count();
        if (outcomes[i].degenerate) ++result.degenerate_points;
    }
    result.metadata = base_metadata(spec.name, config);
    result.metadata["truncation_warnings"] = result.truncation_warnings;
    result.metadata["rows"] = result.rows.size();
    return result;
}

RowOutcome degenerate_row(std::size_t columns) {
    return {std::vector<std::optional<double>>(columns), true};
}

} // namespace

std::string_view library_version() { return WMECS_VERSION; }

SweepAxis parse_sweep_axis(std::string_view text) {
    const auto eq = text.find('=');
    if (eq == std::string_view::npos || eq == 0) {
        throw ConfigError("sweep must be <param>=<min>:<max>:<points>, got '" + std::string(text) + "'");
    }
    return {std::string(text.substr(0, eq)), RangeSpec::parse(text.substr(eq + 1))};
}

std::string format_cell(std::optional<double> value) {
    if (!value || !std::isfinite(*value)) return std::string(kMissingValue);
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), *value);
    if (ec != std::errc{}) return std::string(kMissingValue);
    return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const SweepResult& result) {
    for (std::size_t k = 0; k < result.header.size(); ++k) out << (k ? "," : "") << result.header[k];
    out << '\n';
    for (const auto& row : result.rows) {
        for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << format_cell(row[k]);
        out << '\n';
    }
}

std::string to_csv(const SweepResult& result) {
    std::ostringstream out;
    write_csv(out, result);
    return out.str();
}

SweepResult cmd_probability(const WeakMeasurementConfig& config, const SweepPlan& plan,
                            const SweepOptions& options) {
    const CommandSpec spec{"probability", {"s", "theta"}, {config.coupling.s1, config.wv.theta1}, {"P_s"}};
    return run(spec, config, plan, options, [&](const Point& p, WarningSink& sink) {
        const double s = p.at("s");
        const double theta = p.at("theta");
        const WeakValueParams wv{theta, config.wv.delta1, theta, config.wv.delta2};
        const FockControls controls = config.controls();
        const TwoModeState ecs = build_ecs(config.ecs, config.cutoff, controls, &sink);
        const BranchOperator branches{wv, CouplingParams{s, s}, config.cutoff, config.displacement_convention,
                                      controls};
        // P_s is reported even when the projection degenerates; it is simply ~0 there.
        return RowOutcome{{branches.apply(ecs).amplitudes().squaredNorm()}};
    });
}

SweepResult cmd_squeezing(const WeakMeasurementConfig& config, const SweepPlan& plan, const SweepOptions& options) {
    const CommandSpec spec{
        "squeezing", {"s1", "s2"}, {config.coupling.s1, config.coupling.s2}, {"S2s_direct", "S2s_normal"}};
    return run(spec, config, plan, options, [&](const Point& p, WarningSink& sink) {
        WeakMeasurementConfig c = config;
        c.coupling = CouplingParams{p.at("s1"), p.at("s2")};
        try {
            const auto outcome = build_pointer_state(c, &sink);
            const auto report = sum_squeezing(outcome.state, c.theta_big);
            return RowOutcome{{report.s2s_direct, report.s2s_normal_ordered}};
        } catch (const DegeneratePostSelection&) {
            return degenerate_row(2);
        }
    });
}

SweepResult cmd_hz(const WeakMeasurementConfig& config, const SweepPlan& plan, const SweepOptions& options) {
    const CommandSpec spec{"hz", {"s1", "s2"}, {config.coupling.s1, config.coupling.s2}, {"E", "entangled_flag"}};
    return run(spec, config, plan, options, [&](const Point& p, WarningSink& sink) {
        WeakMeasurementConfig c = config;
        c.coupling = CouplingParams{p.at("s1"), p.at("s2")};
        try {
            const auto outcome = build_pointer_state(c, &sink);
            const double e = hz_correlation(outcome.state);
            return RowOutcome{{e, hz_entangled(e) ? 1.0 : 0.0}};
        } catch (const DegeneratePostSelection&) {
            return degenerate_row(2);
        }
    });
}

SweepResult cmd_qcrb(const WeakMeasurementConfig& config, const SweepPlan& plan, const SweepOptions& options) {
    const CommandSpec spec{
        "qcrb", {"r", "s"}, {config.ecs.r, config.coupling.s1}, {"Q_fi", "delta_phi", "Q_fi_alt"}};
    return run(spec, config, plan, options, [&](const Point& p, WarningSink& sink) {
        WeakMeasurementConfig c = config;
        c.ecs = EcsParams{p.at("r"), config.ecs.mu, config.ecs.varphi};
        c.coupling = CouplingParams{p.at("s"), p.at("s")};
        try {
            const double q = qfi(c, &sink);
            WeakMeasurementConfig other = c;
            other.qfi_gauge = c.qfi_gauge == QfiGauge::fixed_kappa ? QfiGauge::renormalized : QfiGauge::fixed_kappa;
            WarningSink scratch;  // same states as above; warnings already counted once
            const double q_alt = qfi(other, &scratch);

            RowOutcome row;
            row.observables.emplace_back(q);
            row.observables.push_back(q >= kQfiFloor ? std::optional<double>(qcrb(q, 1)) : std::nullopt);
            const bool differs = std::abs(q - q_alt) > kGaugeReportThreshold * std::abs(q);
            row.observables.push_back(differs ? std::optional<double>(q_alt) : std::nullopt);
            return row;
        } catch (const DegeneratePostSelection&) {
            return degenerate_row(3);
        }
    });
}

SweepResult cmd_wigner(const WeakMeasurementConfig& config, const SweepPlan& plan, const SweepOptions& options) {
    config.validate();
    const RangeSpec window{-kWignerWindow, kWignerWindow, kWignerPoints};
    const CommandSpec spec{"wigner", {"re_gamma", "re_beta"}, {0.0, 0.0}, {"P_J"}};

    // Unswept Wigner axes default to the full window rather than a single point.
    SweepPlan full_plan = plan;
    for (const auto& name : spec.axis_columns) {
        const bool present = std::any_of(plan.begin(), plan.end(), [&](const SweepAxis& a) { return a.name == name; });
        if (!present) full_plan.push_back({name, window});
    }
    const Grid grid = resolve(spec, full_plan);
    const bool gamma_outer = grid.names.front() == "re_gamma";
    const auto& gamma_axis = grid.values[gamma_outer ? 0 : 1];
    const auto& beta_axis = grid.values[gamma_outer ? 1 : 0];

    WarningSink sink;
    SweepResult result;
    result.header = {"re_gamma", "re_beta", "P_J"};
    std::optional<double> minimum;
    try {
        const auto outcome = build_pointer_state(config, &sink);
        const FockControls controls = config.controls();
        Eigen::MatrixXd values(gamma_axis.size(), beta_axis.size());
        if (gamma_axis.size() >= 2 && beta_axis.size() >= 2) {
            const RangeSpec g{gamma_axis.front(), gamma_axis.back(), static_cast<int>(gamma_axis.size())};
            const RangeSpec b{beta_axis.front(), beta_axis.back(), static_cast<int>(beta_axis.size())};
            values = joint_wigner_grid(outcome.state, g, b, controls, options.threads).values;
        } else {
            for (std::size_t i = 0; i < gamma_axis.size(); ++i) {
                for (std::size_t j = 0; j < beta_axis.size(); ++j) {
                    values(i, j) = joint_wigner_point(outcome.state, gamma_axis[i], beta_axis[j], controls);
                }
            }
        }
        minimum = values.minCoeff();
        const std::size_t count = grid.size();
        for (std::size_t k = 0; k < count; ++k) {
            const std::size_t outer = k / grid.values[1].size();
            const std::size_t inner_idx = k % grid.values[1].size();
            const std::size_t gi = gamma_outer ? outer : inner_idx;
            const std::size_t bj = gamma_outer ? inner_idx : outer;
            result.rows.push_back({gamma_axis[gi], beta_axis[bj], values(gi, bj)});
        }
    } catch (const DegeneratePostSelection&) {
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const Point p = grid.point(k);
            result.rows.push_back({p.at("re_gamma"), p.at("re_beta"), std::nullopt});
        }
        result.degenerate_points = result.rows.size();
    }

    result.truncation_warnings = sink.count();
    result.metadata = base_metadata(spec.name, config);
    result.metadata["truncation_warnings"] = result.truncation_warnings;
    result.metadata["rows"] = result.rows.size();
    result.metadata["grid_minimum"] = minimum ? nlohmann::json(*minimum) : nlohmann::json(nullptr);
    return result;
}

} // namespace wmecs
