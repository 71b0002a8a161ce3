// ecs_sweep: parameter sweeps over the post-selected weak-measurement pipeline.
//
//   ecs_sweep probability --sweep s=0:3:31 --sweep theta=0:0.9pi:10 --out p.csv --meta p.json
//   ecs_sweep wigner --s1 1 --s2 1 --out w.csv
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure, 4 degenerate post-selection
// on a single-point invocation.

#include <wmecs/config.hpp>
#include <wmecs/parallel.hpp>
#include <wmecs/sweep.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitDegenerate = 4;

struct Flags {
    std::map<std::string, std::string> values;  // flag name -> raw text, only when given
    std::vector<std::string> sweeps;
    std::string out;
    std::string meta;
    std::string config_file;
    unsigned threads = wmecs::default_thread_count();
};

wmecs::WeakMeasurementConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw wmecs::ConfigError("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw wmecs::ConfigError("cannot parse config file '" + path + "': " + e.what());
    }
    return wmecs::config_from_json(j.contains("config") ? j.at("config") : j);
}

wmecs::WeakMeasurementConfig build_config(const Flags& flags) {
    wmecs::WeakMeasurementConfig c = flags.config_file.empty() ? wmecs::WeakMeasurementConfig{}
                                                               : load_config(flags.config_file);
    auto real = [&](const char* name, double fallback) {
        const auto it = flags.values.find(name);
        return it == flags.values.end() ? fallback : wmecs::parse_real(it->second);
    };
    c.ecs = wmecs::EcsParams{real("r", c.ecs.r), real("mu", c.ecs.mu), real("varphi", c.ecs.varphi)};
    c.wv = wmecs::WeakValueParams{real("theta1", c.wv.theta1), real("delta1", c.wv.delta1),
                                  real("theta2", c.wv.theta2), real("delta2", c.wv.delta2)};
    c.coupling = wmecs::CouplingParams{real("s1", c.coupling.s1), real("s2", c.coupling.s2)};
    c.theta_big = real("theta-big", c.theta_big);
    c.tail_tolerance = real("tail-tol", c.tail_tolerance);
    if (auto it = flags.values.find("cutoff"); it != flags.values.end()) {
        const auto comma = it->second.find(',');
        const int a = static_cast<int>(wmecs::parse_real(it->second.substr(0, comma)));
        const int b = comma == std::string::npos ? a : static_cast<int>(wmecs::parse_real(it->second.substr(comma + 1)));
        c.cutoff = wmecs::FockCutoff{a, b};
    }
    if (auto it = flags.values.find("displacement-convention"); it != flags.values.end()) {
        c.displacement_convention = wmecs::parse_displacement_convention(it->second);
    }
    if (auto it = flags.values.find("qfi-gauge"); it != flags.values.end()) {
        c.qfi_gauge = wmecs::parse_qfi_gauge(it->second);
    }
    c.validate();
    return c;
}

void add_common_flags(CLI::App& cmd, Flags& flags) {
    static const std::vector<std::pair<std::string, std::string>> params = {
        {"r", "coherent amplitude magnitude"},
        {"mu", "coherent amplitude phase (radians, or e.g. 0.5pi)"},
        {"varphi", "phase shift on mode b"},
        {"theta1", "pre-selection polar angle of the sigma_x qubit, in [0, pi)"},
        {"delta1", "pre-selection relative phase of the sigma_x qubit"},
        {"theta2", "pre-selection polar angle of the sigma_y qubit, in [0, pi)"},
        {"delta2", "pre-selection relative phase of the sigma_y qubit"},
        {"s1", "coupling strength on mode a"},
        {"s2", "coupling strength on mode b"},
        {"theta-big", "sum-squeezing quadrature angle"},
        {"cutoff", "Fock cutoff n_max (one value, or a,b per mode)"},
        {"tail-tol", "truncation tail tolerance, in (0, 1e-4]"},
        {"displacement-convention", "half (branch shifts +-s/2) or full (+-s)"},
        {"qfi-gauge", "fixed-kappa or renormalized"},
    };
    for (const auto& [name, help] : params) {
        cmd.add_option_function<std::string>(
            "--" + name, [&flags, name = name](const std::string& v) { flags.values[name] = v; }, help);
    }
    cmd.add_option("--sweep", flags.sweeps, "<param>=<min>:<max>:<points>, repeatable, outermost first");
    cmd.add_option("--out", flags.out, "CSV output path (stdout when omitted)");
    cmd.add_option("--meta", flags.meta, "JSON metadata output path");
    cmd.add_option("--config", flags.config_file, "JSON config (or metadata file) to start from");
    cmd.add_option("--threads", flags.threads, "worker threads")->check(CLI::PositiveNumber);
}

int run(const std::string& command, const Flags& flags) {
    using Runner = std::function<wmecs::SweepResult(const wmecs::WeakMeasurementConfig&, const wmecs::SweepPlan&,
                                                    const wmecs::SweepOptions&)>;
    static const std::map<std::string, Runner> runners = {
        {"probability", wmecs::cmd_probability}, {"squeezing", wmecs::cmd_squeezing},
        {"wigner", wmecs::cmd_wigner},           {"hz", wmecs::cmd_hz},
        {"qcrb", wmecs::cmd_qcrb},
    };

    const auto config = build_config(flags);
    wmecs::SweepPlan plan;
    for (const auto& s : flags.sweeps) plan.push_back(wmecs::parse_sweep_axis(s));

    const auto result = runners.at(command)(config, plan, wmecs::SweepOptions{flags.threads});

    if (flags.out.empty()) {
        wmecs::write_csv(std::cout, result);
    } else {
        std::ofstream out(flags.out, std::ios::binary);
        if (!out) throw wmecs::ConfigError("cannot write '" + flags.out + "'");
        wmecs::write_csv(out, result);
    }
    if (!flags.meta.empty()) {
        std::ofstream meta(flags.meta, std::ios::binary);
        if (!meta) throw wmecs::ConfigError("cannot write '" + flags.meta + "'");
        meta << result.metadata.dump(2) << '\n';
    }
    if (result.truncation_warnings > 0) {
        std::cerr << "warning: " << result.truncation_warnings
                  << " truncation warning(s); consider a larger --cutoff\n";
    }
    if (result.degenerate_points > 0) {
        std::cerr << "note: " << result.degenerate_points << " degenerate post-selection point(s) emitted as NA\n";
        if (plan.empty() && command != "wigner") return kExitDegenerate;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sweeps over entangled coherent states under post-selected weak measurement"};
    app.require_subcommand(1);
    Flags flags;
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"probability", "post-selection success probability over (s, theta)"},
        {"squeezing", "sum squeezing over (s1, s2)"},
        {"wigner", "scaled joint Wigner cross-section over (re_gamma, re_beta)"},
        {"hz", "Hillery-Zubairy correlation over (s1, s2)"},
        {"qcrb", "quantum Fisher information and Cramer-Rao bound over (r, s)"},
    };
    for (const auto& [name, help] : commands) add_common_flags(*app.add_subcommand(name, help), flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        return run(app.get_subcommands().front()->get_name(), flags);
    } catch (const wmecs::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const wmecs::DegeneratePostSelection& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDegenerate;
    } catch (const wmecs::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const wmecs::DimensionError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
}
