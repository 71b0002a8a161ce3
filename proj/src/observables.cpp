#include <wmecs/observables.hpp>

#include <wmecs/measurement.hpp>
#include <wmecs/parallel.hpp>

#include <cmath>
#include <sstream>

namespace wmecs {

namespace {

constexpr double kRealnessTolerance = 1e-10;
constexpr double kRichardsonRelTolerance = 1e-6;
constexpr double kRichardsonAbsTolerance = 1e-9;

// Applies op_a (x) op_b to a state given as raw matrices.
Matrix apply_pair(const Matrix& op_a, const Matrix& c, const Matrix& op_b) {
    return op_a * c * op_b.transpose();
}

// sum_{n_a, n_b} (-1)^{n_a + n_b} |y(n_a, n_b)|^2
double parity_form(const Matrix& y) {
    double total = 0.0;
    for (Eigen::Index nb = 0; nb < y.cols(); ++nb) {
        for (Eigen::Index na = 0; na < y.rows(); ++na) {
            const double p = std::norm(y(na, nb));
            total += ((na + nb) % 2 == 0) ? p : -p;
        }
    }
    return total;
}

void require_grid_range(const RangeSpec& r, const char* name) {
    if (r.points < 2 || !(r.min < r.max)) {
        throw ConfigError(std::string(name) + " grid range needs min < max and at least 2 points");
    }
}

Matrix derivative(const TwoModeState& plus, const TwoModeState& minus, double step) {
    return (plus.amplitudes() - minus.amplitudes()) / (2.0 * step);
}

} // namespace

double sum_squeezing_direct(const TwoModeState& state, double theta_big) {
    const auto& cut = state.cutoff();
    const Matrix a = annihilation(cut.n_max_a).matrix();
    const Matrix b = annihilation(cut.n_max_b).matrix();
    const auto& c = state.amplitudes();

    const Complex up = 0.5 * std::polar(1.0, theta_big);
    const Complex down = 0.5 * std::polar(1.0, -theta_big);
    const TwoModeState v_psi{cut, up * apply_pair(a.adjoint(), c, b.adjoint()) + down * apply_pair(a, c, b)};

    const double mean_v = inner(state, v_psi).real();
    const double mean_v2 = inner(v_psi, v_psi).real();
    const double denom = expectation(state, number_operator(cut.n_max_a), Mode::a).real() +
                         expectation(state, number_operator(cut.n_max_b), Mode::b).real() + 1.0;
    return 4.0 * (mean_v2 - mean_v * mean_v) / denom - 1.0;
}

double sum_squeezing_normal_ordered(const TwoModeState& state, double theta_big) {
    const auto& cut = state.cutoff();
    const ModeOperator a = annihilation(cut.n_max_a);
    const ModeOperator b = annihilation(cut.n_max_b);
    const ModeOperator na = number_operator(cut.n_max_a);
    const ModeOperator nb = number_operator(cut.n_max_b);

    const Complex a2b2 = expectation(state, a * a, b * b);
    const Complex ab = expectation(state, a, b);
    const double nanb = expectation(state, na, nb).real();
    const double mean_na = expectation(state, na, Mode::a).real();
    const double mean_nb = expectation(state, nb, Mode::b).real();

    const double first = (std::polar(1.0, -2.0 * theta_big) * a2b2).real();
    const double second = (std::polar(1.0, -theta_big) * ab).real();
    return 2.0 * (first - 2.0 * second * second + nanb) / (mean_na + mean_nb + 1.0);
}

SqueezingReport sum_squeezing(const TwoModeState& state, double theta_big) {
    return {sum_squeezing_direct(state, theta_big), sum_squeezing_normal_ordered(state, theta_big), theta_big};
}

double joint_wigner_point(const TwoModeState& state, Complex gamma, Complex beta, const FockControls& controls) {
    const auto& cut = state.cutoff();
    const ModeOperator shift_a = displacement_matrix(-gamma, cut.n_max_a, controls);
    const ModeOperator shift_b = displacement_matrix(-beta, cut.n_max_b, controls);
    const TwoModeState displaced = apply_to_mode(shift_b, Mode::b, apply_to_mode(shift_a, Mode::a, state));
    const Complex value = expectation(displaced, parity(cut.n_max_a), parity(cut.n_max_b));
    if (std::abs(value.imag()) > kRealnessTolerance) {
        std::ostringstream msg;
        msg << "joint_wigner_point: imaginary residue " << value.imag() << " exceeds tolerance";
        throw NumericalError(msg.str());
    }
    return value.real();
}

WignerGrid joint_wigner_grid(const TwoModeState& state, const RangeSpec& re_gamma, const RangeSpec& re_beta,
                             const FockControls& controls, unsigned threads) {
    require_grid_range(re_gamma, "Re(gamma)");
    require_grid_range(re_beta, "Re(beta)");
    const auto& cut = state.cutoff();

    WignerGrid grid;
    grid.re_gamma_axis = re_gamma.values();
    grid.re_beta_axis = re_beta.values();
    const auto rows = grid.re_gamma_axis.size();
    const auto cols = grid.re_beta_axis.size();

    // Each axis value needs one displacement; rows reuse the mode-a product.
    std::vector<Matrix> left(rows);
    std::vector<Matrix> right_t(cols);
    parallel_for(rows, threads, [&](std::size_t i) {
        left[i] = displacement_matrix(-grid.re_gamma_axis[i], cut.n_max_a, controls).matrix();
    });
    parallel_for(cols, threads, [&](std::size_t j) {
        right_t[j] = displacement_matrix(-grid.re_beta_axis[j], cut.n_max_b, controls).matrix().transpose();
    });

    grid.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    parallel_for(rows, threads, [&](std::size_t i) {
        const Matrix shifted_a = left[i] * state.amplitudes();
        for (std::size_t j = 0; j < cols; ++j) {
            grid.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                parity_form(shifted_a * right_t[j]);
        }
    });
    return grid;
}

double hz_correlation(const TwoModeState& state) {
    const auto& cut = state.cutoff();
    const double mean_na = expectation(state, number_operator(cut.n_max_a), Mode::a).real();
    const double mean_nb = expectation(state, number_operator(cut.n_max_b), Mode::b).real();
    const Complex ab = expectation(state, annihilation(cut.n_max_a), annihilation(cut.n_max_b));
    return mean_na * mean_nb - std::norm(ab);
}

double qfi_from_derivative(const TwoModeState& state, const TwoModeState& derivative) {
    return 4.0 * (inner(derivative, derivative).real() - std::norm(inner(derivative, state)));
}

double qfi_central_difference(const StateFamily& family, double phi0, double h) {
    if (!(h >= 1e-7 && h <= 1e-3)) throw ConfigError("finite-difference step must lie in [1e-7, 1e-3]");
    const TwoModeState center = family(phi0);
    const auto& cut = center.cutoff();

    std::vector<Matrix> d;
    for (double step : {h, h / 2, h / 4}) d.push_back(derivative(family(phi0 + step), family(phi0 - step), step));
    const TwoModeState coarse{cut, (4.0 * d[1] - d[0]) / 3.0};
    const TwoModeState fine{cut, (4.0 * d[2] - d[1]) / 3.0};

    const double q_coarse = qfi_from_derivative(center, coarse);
    const double q_fine = qfi_from_derivative(center, fine);
    if (std::abs(q_coarse - q_fine) > kRichardsonRelTolerance * std::abs(q_fine) + kRichardsonAbsTolerance) {
        std::ostringstream msg;
        msg << "qfi_central_difference: Richardson estimates disagree (" << q_coarse << " vs " << q_fine
            << "); step h=" << h << " is too small";
        throw NumericalError(msg.str());
    }
    return q_fine;
}

double qfi_finite_difference(const WeakMeasurementConfig& config, double h, WarningSink* sink) {
    config.validate();
    const FockControls controls = config.controls();
    const BranchOperator branches{config.wv, config.coupling, config.cutoff, config.displacement_convention,
                                  controls};
    const double phi0 = config.ecs.varphi;
    auto ecs_at = [&](double phi) {
        const EcsParams p{config.ecs.r, config.ecs.mu, phi};
        return build_ecs(p, config.cutoff, controls, sink);
    };

    const TwoModeState center = branches.apply(ecs_at(phi0));
    const double p_success = center.amplitudes().squaredNorm();
    if (!(p_success > kDegenerateSuccessProbability)) {
        throw DegeneratePostSelection("qfi_finite_difference: post-selection success probability is zero");
    }
    const auto reference = dominant_index(center);

    StateFamily family;
    if (config.qfi_gauge == QfiGauge::fixed_kappa) {
        // One constant rescaling and phase for the whole family.
        const Complex ref = center.amplitudes()(reference.first, reference.second);
        const Complex gauge = std::conj(ref) / std::abs(ref) / std::sqrt(p_success);
        family = [&, gauge](double phi) { return gauge * branches.apply(ecs_at(phi)); };
    } else {
        family = [&](double phi) {
            const TwoModeState projected = branches.apply(ecs_at(phi));
            if (!(projected.amplitudes().squaredNorm() > kDegenerateSuccessProbability)) {
                throw DegeneratePostSelection("qfi_finite_difference: post-selection degenerates near varphi");
            }
            return fix_phase_at(normalize(projected), reference);
        };
    }
    return qfi_central_difference(family, phi0, h);
}

double qfi_analytic(const WeakMeasurementConfig& config, WarningSink* sink) {
    config.validate();
    const FockControls controls = config.controls();
    const auto& cut = config.cutoff;
    const BranchOperator branches{config.wv, config.coupling, cut, config.displacement_convention, controls};

    const TwoModeState projected = branches.apply(build_ecs(config.ecs, cut, controls, sink));
    const double p_success = projected.amplitudes().squaredNorm();
    if (!(p_success > kDegenerateSuccessProbability)) {
        throw DegeneratePostSelection("qfi_analytic: post-selection success probability is zero");
    }
    const double kappa = 1.0 / std::sqrt(p_success);

    const Complex shifted = config.ecs.alpha() * std::polar(1.0, config.ecs.varphi);
    const Vector coh_b = coherent_column(shifted, cut.n_max_b, controls, sink).amplitudes;
    const Vector d_coh_b = Complex{0.0, 1.0} * shifted * (creation(cut.n_max_b).matrix() * coh_b);
    Vector vac_a = Vector::Zero(cut.dim_a());
    vac_a(0) = 1.0;
    const TwoModeState d_ecs{cut, ecs_normalization(config.ecs.r) * vac_a * d_coh_b.transpose()};

    const TwoModeState state = kappa * projected;
    const TwoModeState d_state = kappa * branches.apply(d_ecs);
    return qfi_from_derivative(state, d_state);
}

double qfi(const WeakMeasurementConfig& config, WarningSink* sink) {
    return config.qfi_gauge == QfiGauge::fixed_kappa ? qfi_analytic(config, sink)
                                                     : qfi_finite_difference(config, 1e-5, sink);
}

double qcrb(double qfi, int shots) {
    if (!(qfi > 0.0)) throw ConfigError("qcrb: quantum Fisher information must be > 0");
    if (shots < 1) throw ConfigError("qcrb: shot count must be >= 1");
    return 1.0 / std::sqrt(static_cast<double>(shots) * qfi);
}

MetrologyReport metrology_report(double qfi_value, int shots) {
    return {qfi_value, qcrb(qfi_value, shots), shots};
}

} // namespace wmecs
