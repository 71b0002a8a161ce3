#pragma once

// Non-classicality diagnostics evaluated on two-mode pointer states.

#include <wmecs/config.hpp>
#include <wmecs/fock.hpp>

#include <functional>
#include <vector>

namespace wmecs {

struct SqueezingReport {
    double s2s_direct = 0.0;
    double s2s_normal_ordered = 0.0;
    double theta_big = 0.0;
};

/// 4(<V^2> - <V>^2)/<N_a + N_b + 1> - 1 with V = (e^{i Theta} a^dag b^dag + e^{-i Theta} a b)/2.
double sum_squeezing_direct(const TwoModeState& state, double theta_big);

/// The same quantity expanded in the normally ordered moments <a^2 b^2>, <ab>, <N_a N_b>, <N_a>, <N_b>.
/// Agrees with the direct form whenever the top Fock row and column carry no amplitude.
double sum_squeezing_normal_ordered(const TwoModeState& state, double theta_big);

SqueezingReport sum_squeezing(const TwoModeState& state, double theta_big);

/// Scaled joint Wigner function P_J(gamma, beta) = <psi_d| P_a P_b |psi_d>, with
/// |psi_d> = D_a(gamma)^dag D_b(beta)^dag |state>. The full W_J is (4/pi^2) P_J.
double joint_wigner_point(const TwoModeState& state, Complex gamma, Complex beta,
                          const FockControls& controls = {});

struct WignerGrid {
    std::vector<double> re_gamma_axis;
    std::vector<double> re_beta_axis;
    Eigen::MatrixXd values;  // rows: Re(gamma), cols: Re(beta)

    double minimum() const { return values.minCoeff(); }
    double maximum() const { return values.maxCoeff(); }
};

/// P_J on the Im(gamma) = Im(beta) = 0 cross-section. Both ranges need min < max and >= 2 points.
WignerGrid joint_wigner_grid(const TwoModeState& state, const RangeSpec& re_gamma, const RangeSpec& re_beta,
                             const FockControls& controls = {}, unsigned threads = 1);

/// E = <a^dag a><b^dag b> - |<ab>|^2; E < 0 witnesses two-mode entanglement.
double hz_correlation(const TwoModeState& state);
inline bool hz_entangled(double e) { return e < 0.0; }

/// 4[<d|d> - |<d|psi>|^2] for a state and its parameter derivative.
double qfi_from_derivative(const TwoModeState& state, const TwoModeState& derivative);

using StateFamily = std::function<TwoModeState(double)>;

/// Pure-state QFI of a one-parameter family from central differences at steps h, h/2, h/4,
/// Richardson-extrapolated. Throws NumericalError when the two extrapolants disagree (the step
/// is lost to round-off) and ConfigError when h is outside [1e-7, 1e-3].
double qfi_central_difference(const StateFamily& family, double phi0, double h = 1e-5);

/// QFI of the post-selected pointer state with respect to varphi, by finite differences.
/// fixed-kappa gauge: the normalisation 1/sqrt(P_s) is frozen at the central varphi.
/// renormalized gauge: every sample is renormalised and phase-aligned on the central state's
/// dominant amplitude.
double qfi_finite_difference(const WeakMeasurementConfig& config, double h = 1e-5, WarningSink* sink = nullptr);

/// Closed-form fixed-kappa QFI: only the mode-b coherent branch carries varphi, so
/// d|Phi>/d varphi = kappa chi [N |0>_a (i alpha e^{i varphi} b^dag)|alpha e^{i varphi}>_b].
double qfi_analytic(const WeakMeasurementConfig& config, WarningSink* sink = nullptr);

/// QFI in the gauge selected by config.qfi_gauge (analytic for fixed-kappa).
double qfi(const WeakMeasurementConfig& config, WarningSink* sink = nullptr);

/// 1/sqrt(shots * qfi). Throws ConfigError when qfi <= 0 or shots < 1.
double qcrb(double qfi, int shots = 1);

struct MetrologyReport {
    double qfi = 0.0;
    double qcrb = 0.0;
    int shots = 1;
};

MetrologyReport metrology_report(double qfi, int shots = 1);

} // namespace wmecs
