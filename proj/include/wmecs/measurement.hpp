#pragma once

#include <wmecs/config.hpp>
#include <wmecs/fock.hpp>

namespace wmecs {

/// N = [2(1 + e^{-r^2})]^{-1/2}.
double ecs_normalization(double r);

/// N(|alpha>_a|0>_b + |0>_a|alpha e^{i varphi}>_b).
TwoModeState build_ecs(const EcsParams& params, FockCutoff cutoff, const FockControls& controls = {},
                       WarningSink* sink = nullptr);

/// <sigma_x>_w = e^{i delta1} tan(theta1/2).
Complex weak_value_x(double theta1, double delta1);
/// <sigma_y>_w = -i e^{i delta2} tan(theta2/2).
Complex weak_value_y(double theta2, double delta2);

// Coefficients of the four displaced branches after post-selection.
//   a_plus  -> D_a(+)D_b(+)    a_minus -> D_a(-)D_b(-)
//   b_plus  -> D_a(-)D_b(+)    b_minus -> D_a(+)D_b(-)
// `overlap` is the post-selection amplitude cos(theta1/2)cos(theta2/2).
struct BranchCoefficients {
    Complex a_plus;
    Complex a_minus;
    Complex b_plus;
    Complex b_minus;
    double overlap = 1.0;
};

BranchCoefficients branch_coefficients(const WeakValueParams& wv);

// Precomputed mode-local displacements for one coupling setting. D(-x) is the adjoint of D(+x).
class BranchOperator {
public:
    BranchOperator(const WeakValueParams& wv, const CouplingParams& coupling, FockCutoff cutoff,
                   DisplacementConvention convention = DisplacementConvention::half,
                   const FockControls& controls = {});

    /// (overlap/4) [A+ D_a(+)D_b(+) + A- D_a(-)D_b(-) + B+ D_a(-)D_b(+) + B- D_a(+)D_b(-)] |input>,
    /// i.e. the unnormalised post-selected pointer state.
    TwoModeState apply(const TwoModeState& input) const;

    const BranchCoefficients& coefficients() const { return coefficients_; }

private:
    BranchCoefficients coefficients_;
    FockCutoff cutoff_;
    Matrix da_plus_;
    Matrix da_minus_;
    Matrix db_plus_t_;   // transposed, ready for right multiplication
    Matrix db_minus_t_;
};

struct PostSelectedOutcome {
    TwoModeState state;  // normalised, largest amplitude real-positive
    double success_probability = 0.0;
};

/// Success probabilities at or below this value are treated as a failed post-selection.
inline constexpr double kDegenerateSuccessProbability = 1e-12;

/// Projects the interacted pointer onto the post-selected qubit state. Throws
/// DegeneratePostSelection when P_s <= kDegenerateSuccessProbability.
PostSelectedOutcome build_pointer_state(const TwoModeState& ecs, const WeakValueParams& wv,
                                        const CouplingParams& coupling,
                                        DisplacementConvention convention = DisplacementConvention::half,
                                        const FockControls& controls = {}, WarningSink* sink = nullptr);

/// build_ecs followed by build_pointer_state, all parameters taken from `config`.
PostSelectedOutcome build_pointer_state(const WeakMeasurementConfig& config, WarningSink* sink = nullptr);

} // namespace wmecs
