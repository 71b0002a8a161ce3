#include <wmecs/config.hpp>

#include <charconv>
#include <cmath>
#include <sstream>

namespace wmecs {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;
// theta within this distance of pi is rejected: |tan(theta/2)| would exceed ~2e9.
constexpr double kThetaGuard = 1e-9;

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) throw ConfigError(std::string(name) + " must be finite");
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

double parse_plain(std::string_view text, std::string_view whole) {
    double v = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || text.empty()) {
        throw ConfigError("cannot parse number '" + std::string(whole) + "'");
    }
    return v;
}

} // namespace

double reduce_angle(double radians) {
    double r = std::fmod(radians, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r = 0.0;
    return r;
}

EcsParams::EcsParams(double r_, double mu_, double varphi_) : r(r_) {
    require_finite(r_, "r");
    require_finite(mu_, "mu");
    require_finite(varphi_, "varphi");
    if (r_ < 0.0) throw ConfigError("r must be >= 0");
    mu = reduce_angle(mu_);
    varphi = reduce_angle(varphi_);
}

Complex EcsParams::alpha() const { return std::polar(r, mu); }

WeakValueParams::WeakValueParams(double t1, double d1, double t2, double d2) {
    for (auto [v, name] : {std::pair{t1, "theta1"}, {d1, "delta1"}, {t2, "theta2"}, {d2, "delta2"}}) {
        require_finite(v, name);
    }
    for (auto [t, name] : {std::pair{t1, "theta1"}, {t2, "theta2"}}) {
        if (t < 0.0 || t > std::numbers::pi - kThetaGuard) {
            throw ConfigError(std::string(name) + " must lie in [0, pi); the weak value diverges at pi");
        }
    }
    theta1 = t1;
    theta2 = t2;
    delta1 = reduce_angle(d1);
    delta2 = reduce_angle(d2);
}

CouplingParams::CouplingParams(double s1_, double s2_) : s1(s1_), s2(s2_) {
    require_finite(s1_, "s1");
    require_finite(s2_, "s2");
    if (s1_ < 0.0 || s2_ < 0.0) throw ConfigError("couplings s1, s2 must be >= 0");
}

std::string to_string(DisplacementConvention c) { return c == DisplacementConvention::half ? "half" : "full"; }

std::string to_string(QfiGauge g) { return g == QfiGauge::fixed_kappa ? "fixed-kappa" : "renormalized"; }

DisplacementConvention parse_displacement_convention(std::string_view text) {
    if (text == "half") return DisplacementConvention::half;
    if (text == "full") return DisplacementConvention::full;
    throw ConfigError("displacement convention must be 'half' or 'full', got '" + std::string(text) + "'");
}

QfiGauge parse_qfi_gauge(std::string_view text) {
    if (text == "fixed-kappa") return QfiGauge::fixed_kappa;
    if (text == "renormalized") return QfiGauge::renormalized;
    throw ConfigError("qfi gauge must be 'fixed-kappa' or 'renormalized', got '" + std::string(text) + "'");
}

void WeakMeasurementConfig::validate() const {
    // Re-running the constructors re-checks every component invariant.
    (void)EcsParams(ecs.r, ecs.mu, ecs.varphi);
    (void)WeakValueParams(wv.theta1, wv.delta1, wv.theta2, wv.delta2);
    (void)CouplingParams(coupling.s1, coupling.s2);
    (void)FockCutoff(cutoff.n_max_a, cutoff.n_max_b);
    require_finite(theta_big, "theta_big");
    if (!(tail_tolerance > 0.0 && tail_tolerance <= 1e-4)) {
        throw ConfigError("tail tolerance must lie in (0, 1e-4]");
    }
}

FockControls WeakMeasurementConfig::controls() const {
    FockControls c;
    c.tail_tolerance = tail_tolerance;
    return c;
}

nlohmann::json to_json(const WeakMeasurementConfig& c) {
    return nlohmann::json{
        {"r", c.ecs.r},
        {"mu", c.ecs.mu},
        {"varphi", c.ecs.varphi},
        {"theta1", c.wv.theta1},
        {"delta1", c.wv.delta1},
        {"theta2", c.wv.theta2},
        {"delta2", c.wv.delta2},
        {"s1", c.coupling.s1},
        {"s2", c.coupling.s2},
        {"theta_big", c.theta_big},
        {"cutoff", {c.cutoff.n_max_a, c.cutoff.n_max_b}},
        {"tail_tolerance", c.tail_tolerance},
        {"displacement_convention", to_string(c.displacement_convention)},
        {"qfi_gauge", to_string(c.qfi_gauge)},
    };
}

WeakMeasurementConfig config_from_json(const nlohmann::json& j) {
    try {
        WeakMeasurementConfig c;
        c.ecs = EcsParams(j.at("r").get<double>(), j.at("mu").get<double>(), j.at("varphi").get<double>());
        c.wv = WeakValueParams(j.at("theta1").get<double>(), j.at("delta1").get<double>(),
                               j.at("theta2").get<double>(), j.at("delta2").get<double>());
        c.coupling = CouplingParams(j.at("s1").get<double>(), j.at("s2").get<double>());
        c.theta_big = j.at("theta_big").get<double>();
        const auto& cut = j.at("cutoff");
        c.cutoff = FockCutoff(cut.at(0).get<int>(), cut.at(1).get<int>());
        c.tail_tolerance = j.at("tail_tolerance").get<double>();
        c.displacement_convention =
            parse_displacement_convention(j.at("displacement_convention").get<std::string>());
        c.qfi_gauge = parse_qfi_gauge(j.at("qfi_gauge").get<std::string>());
        c.validate();
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed config JSON: ") + e.what());
    }
}

double parse_real(std::string_view text) {
    const std::string_view whole = text;
    text = trim(text);
    if (text.empty()) throw ConfigError("empty number");

    const auto pi_pos = text.find("pi");
    if (pi_pos == std::string_view::npos) {
        const double v = parse_plain(text, whole);
        require_finite(v, "value");
        return v;
    }

    double factor = 1.0;
    std::string_view head = text.substr(0, pi_pos);
    if (head == "-") factor = -1.0;
    else if (head == "+") factor = 1.0;
    else if (!head.empty()) factor = parse_plain(head, whole);

    double denominator = 1.0;
    std::string_view tail = text.substr(pi_pos + 2);
    if (!tail.empty()) {
        if (tail.front() != '/') throw ConfigError("cannot parse number '" + std::string(whole) + "'");
        denominator = parse_plain(tail.substr(1), whole);
        if (denominator == 0.0) throw ConfigError("zero denominator in '" + std::string(whole) + "'");
    }
    const double v = factor * std::numbers::pi / denominator;
    require_finite(v, "value");
    return v;
}

std::vector<double> RangeSpec::values() const {
    if (points < 1) throw ConfigError("range needs at least one point");
    if (points == 1) return {min};
    std::vector<double> out(points);
    const double step = (max - min) / (points - 1);
    for (int i = 0; i < points; ++i) out[i] = min + i * step;
    out.back() = max;
    return out;
}

RangeSpec RangeSpec::parse(std::string_view text) {
    const auto first = text.find(':');
    if (first == std::string_view::npos) {
        const double v = parse_real(text);
        return {v, v, 1};
    }
    const auto second = text.find(':', first + 1);
    if (second == std::string_view::npos) {
        throw ConfigError("range must be <min>:<max>:<points>, got '" + std::string(text) + "'");
    }
    RangeSpec r;
    r.min = parse_real(text.substr(0, first));
    r.max = parse_real(text.substr(first + 1, second - first - 1));
    const double pts = parse_real(text.substr(second + 1));
    if (pts < 1 || pts != std::floor(pts) || pts > 1e6) {
        throw ConfigError("range point count must be a positive integer, got '" + std::string(text) + "'");
    }
    r.points = static_cast<int>(pts);
    if (r.points >= 2 && !(r.min < r.max)) {
        throw ConfigError("range needs min < max, got '" + std::string(text) + "'");
    }
    return r;
}

} // namespace wmecs
