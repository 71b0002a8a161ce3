#include <wmecs/measurement.hpp>

#include <cmath>
#include <sstream>

namespace wmecs {

double ecs_normalization(double r) { return 1.0 / std::sqrt(2.0 * (1.0 + std::exp(-r * r))); }

TwoModeState build_ecs(const EcsParams& params, FockCutoff cutoff, const FockControls& controls,
                       WarningSink* sink) {
    const Complex alpha = params.alpha();
    const Complex alpha_shifted = alpha * std::polar(1.0, params.varphi);
    const Vector coh_a = coherent_column(alpha, cutoff.n_max_a, controls, sink).amplitudes;
    const Vector coh_b = coherent_column(alpha_shifted, cutoff.n_max_b, controls, sink).amplitudes;
    Vector vac_a = Vector::Zero(cutoff.dim_a());
    Vector vac_b = Vector::Zero(cutoff.dim_b());
    vac_a(0) = 1.0;
    vac_b(0) = 1.0;

    Matrix c = ecs_normalization(params.r) * (coh_a * vac_b.transpose() + vac_a * coh_b.transpose());
    TwoModeState state{cutoff, std::move(c)};
    const double tail = state.tail_mass();
    if (tail > controls.tail_tolerance) warn(sink, "build_ecs", tail);
    return state;
}

Complex weak_value_x(double theta1, double delta1) {
    const WeakValueParams checked{theta1, delta1, 0.0, 0.0};
    return std::polar(std::tan(checked.theta1 / 2), checked.delta1);
}

Complex weak_value_y(double theta2, double delta2) {
    const WeakValueParams checked{0.0, 0.0, theta2, delta2};
    return Complex{0.0, -1.0} * std::polar(std::tan(checked.theta2 / 2), checked.delta2);
}

BranchCoefficients branch_coefficients(const WeakValueParams& wv) {
    const Complex wx = weak_value_x(wv.theta1, wv.delta1);
    const Complex wy = weak_value_y(wv.theta2, wv.delta2);
    BranchCoefficients c;
    c.a_plus = (1.0 + wx) * (1.0 + wy);
    c.a_minus = (1.0 - wx) * (1.0 - wy);
    c.b_plus = (1.0 - wx) * (1.0 + wy);
    c.b_minus = (1.0 + wx) * (1.0 - wy);
    c.overlap = std::cos(wv.theta1 / 2) * std::cos(wv.theta2 / 2);
    return c;
}

BranchOperator::BranchOperator(const WeakValueParams& wv, const CouplingParams& coupling, FockCutoff cutoff,
                               DisplacementConvention convention, const FockControls& controls)
    : coefficients_(branch_coefficients(wv)), cutoff_(cutoff) {
    const double scale = displacement_scale(convention);
    da_plus_ = displacement_matrix(scale * coupling.s1, cutoff.n_max_a, controls).matrix();
    da_minus_ = da_plus_.adjoint();
    const Matrix db_plus = displacement_matrix(scale * coupling.s2, cutoff.n_max_b, controls).matrix();
    db_plus_t_ = db_plus.transpose();
    db_minus_t_ = db_plus.conjugate();
}

TwoModeState BranchOperator::apply(const TwoModeState& input) const {
    if (!(input.cutoff() == cutoff_)) throw DimensionError("BranchOperator::apply: cutoff mismatch");
    const auto& c = input.amplitudes();
    const Matrix left_plus = da_plus_ * c;
    const Matrix left_minus = da_minus_ * c;
    const auto& k = coefficients_;
    Matrix out = (k.a_plus * left_plus + k.b_plus * left_minus) * db_plus_t_ +
                 (k.b_minus * left_plus + k.a_minus * left_minus) * db_minus_t_;
    out *= k.overlap / 4.0;
    return {cutoff_, std::move(out)};
}

PostSelectedOutcome build_pointer_state(const TwoModeState& ecs, const WeakValueParams& wv,
                                        const CouplingParams& coupling, DisplacementConvention convention,
                                        const FockControls& controls, WarningSink* sink) {
    const BranchOperator branches{wv, coupling, ecs.cutoff(), convention, controls};
    const TwoModeState projected = branches.apply(ecs);
    const double p_success = projected.amplitudes().squaredNorm();
    if (!(p_success > kDegenerateSuccessProbability)) {
        std::ostringstream msg;
        msg << "post-selection success probability " << p_success << " is numerically zero";
        throw DegeneratePostSelection(msg.str());
    }
    TwoModeState state = with_phase_convention(normalize(projected));
    const double tail = state.tail_mass();
    if (tail > controls.tail_tolerance) warn(sink, "build_pointer_state", tail);
    return {std::move(state), p_success};
}

PostSelectedOutcome build_pointer_state(const WeakMeasurementConfig& config, WarningSink* sink) {
    const FockControls controls = config.controls();
    const TwoModeState ecs = build_ecs(config.ecs, config.cutoff, controls, sink);
    return build_pointer_state(ecs, config.wv, config.coupling, config.displacement_convention, controls, sink);
}

} // namespace wmecs
