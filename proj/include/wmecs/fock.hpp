#pragma once

// Truncated single- and two-mode Fock-space arithmetic.
//
// A two-mode state is stored as an (n_max_a+1) x (n_max_b+1) amplitude matrix C with
// C(n_a, n_b) = <n_a, n_b|psi>. An operator acting on mode a multiplies from the left,
// one acting on mode b multiplies C^T from the left (i.e. C * M^T).

#include <wmecs/errors.hpp>

#include <Eigen/Dense>

#include <complex>
#include <utility>

namespace wmecs {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

enum class Mode { a, b };

struct FockCutoff {
    int n_max_a = 40;
    int n_max_b = 40;

    FockCutoff() = default;
    FockCutoff(int a, int b);
    static FockCutoff uniform(int n_max) { return {n_max, n_max}; }

    int dim_a() const { return n_max_a + 1; }
    int dim_b() const { return n_max_b + 1; }
    int dimension() const { return dim_a() * dim_b(); }
    int n_max(Mode m) const { return m == Mode::a ? n_max_a : n_max_b; }

    friend bool operator==(const FockCutoff&, const FockCutoff&) = default;
};

// Numeric controls shared by every builder.
struct FockControls {
    double tail_tolerance = 1e-10;
    double unitarity_tolerance = 1e-8;
    double interior_margin = 0.2;  // fraction of the top indices excluded from interior checks
};

class TwoModeState {
public:
    explicit TwoModeState(FockCutoff cutoff);
    TwoModeState(FockCutoff cutoff, Matrix amplitudes);

    const FockCutoff& cutoff() const { return cutoff_; }
    const Matrix& amplitudes() const { return amplitudes_; }
    Complex operator()(int n_a, int n_b) const { return amplitudes_(n_a, n_b); }

    /// Probability carried by the top row plus the top column of the amplitude grid.
    double tail_mass() const;

    TwoModeState& operator+=(const TwoModeState& other);
    TwoModeState& operator*=(Complex factor);
    friend TwoModeState operator+(TwoModeState lhs, const TwoModeState& rhs) { return lhs += rhs; }
    friend TwoModeState operator*(Complex factor, TwoModeState s) { return s *= factor; }

private:
    FockCutoff cutoff_;
    Matrix amplitudes_;
};

enum class OperatorKind { identity, annihilation, creation, number, parity, displacement, composite };

class ModeOperator {
public:
    ModeOperator(Matrix matrix, OperatorKind kind);

    const Matrix& matrix() const { return matrix_; }
    OperatorKind kind() const { return kind_; }
    int n_max() const { return static_cast<int>(matrix_.rows()) - 1; }

    ModeOperator adjoint() const;
    friend ModeOperator operator*(const ModeOperator& lhs, const ModeOperator& rhs);

private:
    Matrix matrix_;
    OperatorKind kind_;
};

ModeOperator identity_operator(int n_max);
ModeOperator annihilation(int n_max);
ModeOperator creation(int n_max);
ModeOperator number_operator(int n_max);
ModeOperator parity(int n_max);

struct CoherentColumn {
    Vector amplitudes;
    double norm_deficit = 0.0;  // 1 - sum |c_n|^2 lost above n_max
};

/// Closed-form coherent amplitudes e^{-|alpha|^2/2} alpha^n / sqrt(n!) for n = 0..n_max.
/// Emits a truncation warning when the norm deficit exceeds the tail tolerance.
CoherentColumn coherent_column(Complex alpha, int n_max, const FockControls& controls = {},
                               WarningSink* sink = nullptr);

/// Largest Fock index whose displaced image by |gamma| still fits below the cutoff, further
/// capped by the interior margin. Returns -1 when no such index exists.
int displacement_interior_bound(double abs_gamma, int n_max, double interior_margin);

/// Max-entry deviation of D^dagger D from the identity over the columns 0..interior_bound.
double interior_unitarity_defect(const ModeOperator& op, int interior_bound);

/// exp(gamma a^dagger - gamma^* a) on the truncated space.
///
/// The exponential is taken by eigendecomposition of the Hermitian generator i(gamma a^dagger -
/// gamma^* a) on a space of twice the requested dimension and then cropped, so that the
/// reflection artefacts of the truncated generator stay outside the returned block. Throws
/// NumericalError when the interior block is not unitary to the configured tolerance, which
/// means the cutoff is too small for |gamma|.
ModeOperator displacement_matrix(Complex gamma, int n_max, const FockControls& controls = {});

TwoModeState vacuum(FockCutoff cutoff);

/// |u>_a |v>_b with the cutoff taken from the vector lengths.
TwoModeState product_state(const Vector& mode_a, const Vector& mode_b);

TwoModeState apply_to_mode(const ModeOperator& op, Mode mode, const TwoModeState& state);

/// <state| op_a (x) op_b |state>.
Complex expectation(const TwoModeState& state, const ModeOperator& op_a, const ModeOperator& op_b);
/// <state| op on `mode`, identity on the other |state>.
Complex expectation(const TwoModeState& state, const ModeOperator& op, Mode mode);

Complex inner(const TwoModeState& u, const TwoModeState& v);
double norm(const TwoModeState& u);
TwoModeState normalize(const TwoModeState& u);

/// Position (row-major over (n_a, n_b)) of the first amplitude of maximal modulus.
std::pair<int, int> dominant_index(const TwoModeState& u);

/// Rotates the global phase so the amplitude at `index` is real and non-negative.
TwoModeState fix_phase_at(const TwoModeState& u, std::pair<int, int> index);

/// Global phase convention: largest-magnitude amplitude real-positive.
inline TwoModeState with_phase_convention(const TwoModeState& u) {
    return fix_phase_at(u, dominant_index(u));
}

} // namespace wmecs
