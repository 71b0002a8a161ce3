#pragma once

#include <wmecs/fock.hpp>

#include <json.hpp>

#include <numbers>
#include <string>
#include <string_view>
#include <vector>

namespace wmecs {

/// Entangled-coherent-state parameters: alpha = r e^{i mu}, phase shift varphi on mode b.
/// Angles are reduced to [0, 2pi) on construction.
struct EcsParams {
    double r = 0.1;
    double mu = std::numbers::pi / 2;
    double varphi = std::numbers::pi / 2;

    EcsParams() = default;
    EcsParams(double r, double mu, double varphi);

    Complex alpha() const;
    friend bool operator==(const EcsParams&, const EcsParams&) = default;
};

/// Pre-selection angles of the two system qubits. theta_i in [0, pi), delta_i reduced to [0, 2pi).
struct WeakValueParams {
    double theta1 = 4 * std::numbers::pi / 5;
    double delta1 = std::numbers::pi / 2;
    double theta2 = 4 * std::numbers::pi / 5;
    double delta2 = std::numbers::pi / 2;

    WeakValueParams() = default;
    WeakValueParams(double theta1, double delta1, double theta2, double delta2);

    friend bool operator==(const WeakValueParams&, const WeakValueParams&) = default;
};

/// Dimensionless integrated couplings (pointer width already absorbed).
struct CouplingParams {
    double s1 = 0.0;
    double s2 = 0.0;

    CouplingParams() = default;
    CouplingParams(double s1, double s2);

    friend bool operator==(const CouplingParams&, const CouplingParams&) = default;
};

// half: branch displacements +-s/2 (default). full: +-s.
enum class DisplacementConvention { half, full };
enum class QfiGauge { fixed_kappa, renormalized };

inline double displacement_scale(DisplacementConvention c) {
    return c == DisplacementConvention::half ? 0.5 : 1.0;
}

std::string to_string(DisplacementConvention c);
std::string to_string(QfiGauge g);
DisplacementConvention parse_displacement_convention(std::string_view text);
QfiGauge parse_qfi_gauge(std::string_view text);

struct WeakMeasurementConfig {
    EcsParams ecs;
    WeakValueParams wv;
    CouplingParams coupling;
    double theta_big = std::numbers::pi / 2;
    FockCutoff cutoff;
    double tail_tolerance = 1e-10;
    DisplacementConvention displacement_convention = DisplacementConvention::half;
    QfiGauge qfi_gauge = QfiGauge::fixed_kappa;

    /// Throws ConfigError on any violated invariant.
    void validate() const;
    FockControls controls() const;

    friend bool operator==(const WeakMeasurementConfig&, const WeakMeasurementConfig&) = default;
};

nlohmann::json to_json(const WeakMeasurementConfig& config);
WeakMeasurementConfig config_from_json(const nlohmann::json& j);

/// Parses "1.25", "-0.3", "pi", "0.5pi", "4pi/5", "-pi/2" into a real number (radians for the
/// pi forms). Throws ConfigError on malformed input.
double parse_real(std::string_view text);

double reduce_angle(double radians);

/// Inclusive linear range with `points` samples; points == 1 means the single value `min`.
struct RangeSpec {
    double min = 0.0;
    double max = 0.0;
    int points = 1;

    std::vector<double> values() const;
    /// Parses "<min>:<max>:<points>" or a bare value (one point). Endpoints accept the pi forms.
    static RangeSpec parse(std::string_view text);
};

} // namespace wmecs
