// Acceptance harness: one PASS/FAIL line per criterion, with measured runtime against its budget.
// Exit status is nonzero when any criterion fails.

#include <wmecs/measurement.hpp>
#include <wmecs/observables.hpp>
#include <wmecs/parallel.hpp>
#include <wmecs/sweep.hpp>

#include "reference_runs.hpp"
#include "oracles.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace wmecs;
using std::numbers::pi;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Criterion {
    int id;
    std::string title;
    double budget_seconds;
    std::function<Outcome()> check;
};

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

WeakMeasurementConfig default_config() { return WeakMeasurementConfig{}; }

WeakValueParams random_weak_values(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> theta(0.0, 0.95 * pi);
    std::uniform_real_distribution<double> delta(0.0, 2 * pi);
    return {theta(rng), delta(rng), theta(rng), delta(rng)};
}

WignerGrid window_grid(double s, unsigned threads) {
    auto c = default_config();
    c.coupling = CouplingParams{s, s};
    const RangeSpec axis{-kWignerWindow, kWignerWindow, kWignerPoints};
    return joint_wigner_grid(build_pointer_state(c).state, axis, axis, c.controls(), threads);
}

Outcome c1_ecs_squeezing() {
    auto c = default_config();
    const auto ecs = build_ecs(c.ecs, c.cutoff, c.controls());
    const double s = sum_squeezing_direct(ecs, pi / 2);
    return {std::abs(s) <= 1e-9, "S2s = " + fmt(s)};
}

Outcome c2_two_forms() {
    double worst = 0.0;
    std::mt19937_64 rng{20240601};
    std::uniform_real_distribution<double> angle(0.0, 2 * pi);
    for (int k = 0; k < 100; ++k) {
        const auto psi = oracle::random_interior_state(FockCutoff::uniform(12), rng);
        const auto rep = sum_squeezing(psi, angle(rng));
        worst = std::max(worst, std::abs(rep.s2s_direct - rep.s2s_normal_ordered));
    }
    SweepPlan plan{parse_sweep_axis("s1=0:3:31"), parse_sweep_axis("s2=0:3:31")};
    const auto sweep = cmd_squeezing(default_config(), plan, SweepOptions{default_thread_count()});
    bool complete = true;
    for (const auto& row : sweep.rows) {
        if (!row[2] || !row[3]) {
            complete = false;
            continue;
        }
        worst = std::max(worst, std::abs(*row[2] - *row[3]));
    }
    return {complete && worst < 1e-9,
            "max |direct - normal| = " + fmt(worst) + " over 100 random states + " + std::to_string(sweep.rows.size()) +
                " sweep rows"};
}

Outcome c3_wigner_bounds_gaussian() {
    const unsigned threads = default_thread_count();
    const int n = 40;
    const Complex alpha{0.4, 0.2}, beta0{-0.3, 0.1};
    const auto state = product_state(coherent_column(alpha, n).amplitudes, coherent_column(beta0, n).amplitudes);
    const RangeSpec axis{-1.0, 1.0, 21};
    const auto grid = joint_wigner_grid(state, axis, axis, {}, threads);
    double worst = 0.0;
    for (int i = 0; i < 21; ++i) {
        for (int j = 0; j < 21; ++j) {
            const double g = grid.re_gamma_axis[i], b = grid.re_beta_axis[j];
            const double expect = std::exp(-2 * std::norm(g - alpha)) * std::exp(-2 * std::norm(b - beta0));
            worst = std::max(worst, std::abs(grid.values(i, j) - expect));
        }
    }
    double lo = grid.minimum(), hi = grid.maximum();
    for (double s : {0.0, 1.0, 2.0}) {
        const auto g = window_grid(s, threads);
        lo = std::min(lo, g.minimum());
        hi = std::max(hi, g.maximum());
    }
    const bool bounded = lo >= -1 - 1e-9 && hi <= 1 + 1e-9;
    return {bounded && worst <= 1e-6,
            "P_J range [" + fmt(lo) + ", " + fmt(hi) + "], Gaussian max error " + fmt(worst)};
}

Outcome c4_negativity() {
    const unsigned threads = default_thread_count();
    double m[3];
    for (int k = 0; k < 3; ++k) m[k] = window_grid(k, threads).minimum();
    return {m[1] < m[0] && m[2] < m[1],
            "grid minima s=0,1,2: " + fmt(m[0]) + ", " + fmt(m[1]) + ", " + fmt(m[2])};
}

Outcome c5_zero_coupling() {
    auto c = default_config();
    const auto ecs = build_ecs(c.ecs, c.cutoff, c.controls());
    std::mt19937_64 rng{5150};
    double worst_overlap = 0.0, worst_p = 0.0;
    for (int k = 0; k < 20; ++k) {
        const auto wv = random_weak_values(rng);
        const auto out = build_pointer_state(ecs, wv, CouplingParams{0, 0}, c.displacement_convention, c.controls());
        const double expect = std::pow(std::cos(wv.theta1 / 2) * std::cos(wv.theta2 / 2), 2);
        worst_overlap = std::max(worst_overlap, std::abs(std::abs(inner(out.state, ecs)) - 1.0));
        worst_p = std::max(worst_p, std::abs(out.success_probability - expect));
    }
    return {worst_overlap <= 1e-10 && worst_p <= 1e-10,
            "max ||<Phi|phi>| - 1| = " + fmt(worst_overlap) + ", max P_s error " + fmt(worst_p)};
}

Outcome c6_brute_force() {
    const FockCutoff cut{10, 10};
    std::mt19937_64 rng{8086};
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
        const EcsParams p{0.5 * unit(rng), 2 * pi * unit(rng), 2 * pi * unit(rng)};
        const auto wv = random_weak_values(rng);
        const CouplingParams coupling{unit(rng), unit(rng)};
        const auto ecs = build_ecs(p, cut);
        WarningSink sink;
        // Compare unnormalised pointers: the normalised outcome divides both by the same sqrt(P_s).
        const auto out = build_pointer_state(ecs, wv, coupling, DisplacementConvention::half, {}, &sink);
        const auto ref = oracle::brute_force_pointer(ecs, wv, coupling, 0.5);
        const auto ref_state = with_phase_convention(normalize(ref));
        worst = std::max(worst, (out.state.amplitudes() - ref_state.amplitudes()).norm());
        worst = std::max(worst, std::abs(out.success_probability - ref.amplitudes().squaredNorm()));
    }
    return {worst <= 1e-9, "max vector-norm difference " + fmt(worst)};
}

Outcome c7_qfi_cross() {
    auto c = default_config();
    double worst = 0.0;
    for (double r : {0.1, 0.2, 0.3, 0.4, 0.5}) {
        for (double s : {0.0, 0.5, 1.0, 1.5, 2.0}) {
            c.ecs = EcsParams{r, pi / 2, pi / 2};
            c.coupling = CouplingParams{s, s};
            const double a = qfi_analytic(c);
            const double f = qfi_finite_difference(c);
            worst = std::max(worst, std::abs(a - f) / std::abs(a));
        }
    }
    const int n = 40;
    const Vector vac = coherent_column(0.0, n).amplitudes;
    const StateFamily family = [&](double phi) {
        return product_state(vac, coherent_column(std::polar(0.5, phi), n).amplitudes);
    };
    const double coh = qfi_central_difference(family, 0.0);
    return {worst <= 1e-4 && std::abs(coh - 1.0) <= 1e-6,
            "max relative FD/analytic gap " + fmt(worst) + ", coherent QFI - 1 = " + fmt(coh - 1.0)};
}

Outcome c8_qcrb_monotone() {
    auto c = default_config();
    c.ecs = EcsParams{0.3, pi / 2, pi / 2};
    std::vector<double> d;
    for (double s : {0.0, 0.5, 1.0, 1.5, 2.0}) {
        c.coupling = CouplingParams{s, s};
        d.push_back(qcrb(qfi(c)));
    }
    bool decreasing = true;
    for (std::size_t k = 1; k < d.size(); ++k) decreasing = decreasing && d[k] < d[k - 1];
    std::string detail = "delta_phi at s=0..2:";
    for (double v : d) detail += " " + fmt(v);
    return {decreasing, detail};
}

Outcome c9_hz_anchor() {
    double worst = 0.0;
    for (double r : {0.1, 0.3, 0.5}) {
        const auto ecs = build_ecs(EcsParams{r, pi / 2, pi / 2}, FockCutoff::uniform(40));
        const double n2 = 1.0 / (2.0 * (1.0 + std::exp(-r * r)));
        worst = std::max(worst, std::abs(hz_correlation(ecs) - n2 * n2 * std::pow(r, 4)));
    }
    return {worst <= 1e-10, "max |E - N^4 r^4| = " + fmt(worst)};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome c10_determinism() {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / ("wmecs_accept_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    std::string differing;
    bool ok = true;
    for (const auto& run_spec : runs::commands()) {
        std::string outputs[2];
        for (int k = 0; k < 2; ++k) {
            const fs::path out = dir / (run_spec.name + std::to_string(k) + ".csv");
            const std::string cmd = std::string(ECS_SWEEP_PATH) + " " + run_spec.args + " --out " + out.string() + " 2>/dev/null";
            const int status = std::system(cmd.c_str());
            if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
                ok = false;
                differing += " " + run_spec.name + "(exit)";
            }
            outputs[k] = slurp(out);
        }
        if (outputs[0].empty() || outputs[0] != outputs[1]) {
            ok = false;
            differing += " " + run_spec.name;
        }
    }
    fs::remove_all(dir);
    return {ok, ok ? std::to_string(runs::commands().size()) + " reference runs byte-identical"
                   : "differing:" + differing};
}

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "ECS zero-squeezing anchor", 1, c1_ecs_squeezing},
        {2, "sum-squeezing two-form equivalence", 30, c2_two_forms},
        {3, "Wigner bounds and Gaussian check", 60, c3_wigner_bounds_gaussian},
        {4, "Wigner negativity grows with coupling", 300, c4_negativity},
        {5, "zero-coupling identity", 10, c5_zero_coupling},
        {6, "brute-force oracle equivalence", 60, c6_brute_force},
        {7, "QFI cross-validation", 120, c7_qfi_cross},
        {8, "QCRB decreases with coupling at r = 0.3", 60, c8_qcrb_monotone},
        {9, "HZ analytic anchor", 5, c9_hz_anchor},
        {10, "reference run determinism", 0, c10_determinism},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_budget = c.budget_seconds <= 0 || secs < c.budget_seconds;
        const bool pass = o.pass && in_budget;
        failures += !pass;
        std::printf("%s criterion %2d: %s | %s | %.2f s%s\n", pass ? "PASS" : "FAIL", c.id, c.title.c_str(),
                    o.detail.c_str(), secs,
                    in_budget ? "" : (" (budget " + fmt(c.budget_seconds) + " s exceeded)").c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
