#include <wmecs/fock.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace wmecs {

namespace {

// Quantum spread, in units of sqrt(n), allowed on top of the classical turning point when
// deciding which Fock columns a displacement keeps inside the cutoff.
constexpr double kQuantumSpread = 1.5;

void require_same_cutoff(const TwoModeState& u, const TwoModeState& v, const char* where) {
    if (!(u.cutoff() == v.cutoff())) {
        throw DimensionError(std::string(where) + ": states have different cutoffs");
    }
}

void require_mode_dim(const ModeOperator& op, int n_max, const char* where) {
    if (op.n_max() != n_max) {
        std::ostringstream msg;
        msg << where << ": operator dimension " << op.n_max() + 1 << " does not match mode dimension "
            << n_max + 1;
        throw DimensionError(msg.str());
    }
}

Matrix ladder(int n_max) {
    Matrix m = Matrix::Zero(n_max + 1, n_max + 1);
    for (int n = 1; n <= n_max; ++n) m(n - 1, n) = std::sqrt(static_cast<double>(n));
    return m;
}

} // namespace

FockCutoff::FockCutoff(int a, int b) : n_max_a(a), n_max_b(b) {
    if (a < 1 || b < 1) {
        throw ConfigError("Fock cutoff must be >= 1 in both modes, got (" + std::to_string(a) + ", " +
                          std::to_string(b) + ")");
    }
}

TwoModeState::TwoModeState(FockCutoff cutoff)
    : cutoff_(cutoff), amplitudes_(Matrix::Zero(cutoff.dim_a(), cutoff.dim_b())) {}

TwoModeState::TwoModeState(FockCutoff cutoff, Matrix amplitudes)
    : cutoff_(cutoff), amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.rows() != cutoff_.dim_a() || amplitudes_.cols() != cutoff_.dim_b()) {
        throw DimensionError("TwoModeState: amplitude grid shape does not match cutoff");
    }
}

double TwoModeState::tail_mass() const {
    return amplitudes_.row(cutoff_.n_max_a).squaredNorm() + amplitudes_.col(cutoff_.n_max_b).squaredNorm();
}

TwoModeState& TwoModeState::operator+=(const TwoModeState& other) {
    require_same_cutoff(*this, other, "operator+");
    amplitudes_ += other.amplitudes_;
    return *this;
}

TwoModeState& TwoModeState::operator*=(Complex factor) {
    amplitudes_ *= factor;
    return *this;
}

ModeOperator::ModeOperator(Matrix matrix, OperatorKind kind) : matrix_(std::move(matrix)), kind_(kind) {
    if (matrix_.rows() != matrix_.cols() || matrix_.rows() < 2) {
        throw DimensionError("ModeOperator: matrix must be square with dimension >= 2");
    }
}

ModeOperator ModeOperator::adjoint() const {
    OperatorKind k = kind_;
    if (k == OperatorKind::annihilation) k = OperatorKind::creation;
    else if (k == OperatorKind::creation) k = OperatorKind::annihilation;
    return {matrix_.adjoint(), k};
}

ModeOperator operator*(const ModeOperator& lhs, const ModeOperator& rhs) {
    if (lhs.n_max() != rhs.n_max()) throw DimensionError("ModeOperator product: dimension mismatch");
    return {lhs.matrix_ * rhs.matrix_, OperatorKind::composite};
}

ModeOperator identity_operator(int n_max) {
    if (n_max < 1) throw ConfigError("n_max must be >= 1");
    return {Matrix::Identity(n_max + 1, n_max + 1), OperatorKind::identity};
}

ModeOperator annihilation(int n_max) {
    if (n_max < 1) throw ConfigError("n_max must be >= 1");
    return {ladder(n_max), OperatorKind::annihilation};
}

ModeOperator creation(int n_max) {
    if (n_max < 1) throw ConfigError("n_max must be >= 1");
    return {ladder(n_max).adjoint(), OperatorKind::creation};
}

ModeOperator number_operator(int n_max) {
    if (n_max < 1) throw ConfigError("n_max must be >= 1");
    Matrix m = Matrix::Zero(n_max + 1, n_max + 1);
    for (int n = 0; n <= n_max; ++n) m(n, n) = static_cast<double>(n);
    return {std::move(m), OperatorKind::number};
}

ModeOperator parity(int n_max) {
    if (n_max < 1) throw ConfigError("n_max must be >= 1");
    Matrix m = Matrix::Zero(n_max + 1, n_max + 1);
    for (int n = 0; n <= n_max; ++n) m(n, n) = (n % 2 == 0) ? 1.0 : -1.0;
    return {std::move(m), OperatorKind::parity};
}

CoherentColumn coherent_column(Complex alpha, int n_max, const FockControls& controls, WarningSink* sink) {
    if (n_max < 1) throw ConfigError("n_max must be >= 1");
    CoherentColumn out;
    out.amplitudes.resize(n_max + 1);
    out.amplitudes(0) = std::exp(-0.5 * std::norm(alpha));
    for (int n = 1; n <= n_max; ++n) {
        out.amplitudes(n) = out.amplitudes(n - 1) * alpha / std::sqrt(static_cast<double>(n));
    }
    out.norm_deficit = std::max(0.0, 1.0 - out.amplitudes.squaredNorm());
    if (out.norm_deficit > controls.tail_tolerance) warn(sink, "coherent_column", out.norm_deficit);
    return out;
}

int displacement_interior_bound(double abs_gamma, int n_max, double interior_margin) {
    const double reach = std::sqrt(n_max + 1.0) - abs_gamma - kQuantumSpread;
    if (reach <= 0.0) return -1;
    const int by_reach = static_cast<int>(std::floor(reach * reach));
    const int by_margin = n_max - static_cast<int>(std::ceil(interior_margin * n_max));
    return std::min(by_reach, by_margin);
}

double interior_unitarity_defect(const ModeOperator& op, int interior_bound) {
    if (interior_bound < 0) return std::numeric_limits<double>::infinity();
    const auto cols = op.matrix().leftCols(interior_bound + 1);
    const Matrix gram = cols.adjoint() * cols;
    return (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

ModeOperator displacement_matrix(Complex gamma, int n_max, const FockControls& controls) {
    if (n_max < 1) throw ConfigError("n_max must be >= 1");
    const int dim = n_max + 1;
    if (gamma == Complex{0.0, 0.0}) return {Matrix::Identity(dim, dim), OperatorKind::displacement};

    const int work = 2 * dim;
    const Complex i{0.0, 1.0};
    Matrix hermitian = Matrix::Zero(work, work);
    for (int n = 1; n < work; ++n) {
        const double s = std::sqrt(static_cast<double>(n));
        hermitian(n, n - 1) = i * gamma * s;
        hermitian(n - 1, n) = -i * std::conj(gamma) * s;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(hermitian);
    if (eig.info() != Eigen::Success) throw NumericalError("displacement_matrix: eigensolver failed");
    const Vector phases = (-i * eig.eigenvalues().cast<Complex>()).array().exp().matrix();
    const auto& v = eig.eigenvectors();
    Matrix cropped = v.topRows(dim) * phases.asDiagonal() * v.topRows(dim).adjoint();

    ModeOperator op{std::move(cropped), OperatorKind::displacement};
    const int bound = displacement_interior_bound(std::abs(gamma), n_max, controls.interior_margin);
    const double defect = interior_unitarity_defect(op, bound);
    if (!(defect <= controls.unitarity_tolerance)) {
        std::ostringstream msg;
        msg << "displacement_matrix: cutoff n_max=" << n_max << " too small for |gamma|=" << std::abs(gamma)
            << " (interior unitarity defect " << defect << ")";
        throw NumericalError(msg.str());
    }
    return op;
}

TwoModeState vacuum(FockCutoff cutoff) {
    Matrix c = Matrix::Zero(cutoff.dim_a(), cutoff.dim_b());
    c(0, 0) = 1.0;
    return {cutoff, std::move(c)};
}

TwoModeState product_state(const Vector& mode_a, const Vector& mode_b) {
    const FockCutoff cutoff{static_cast<int>(mode_a.size()) - 1, static_cast<int>(mode_b.size()) - 1};
    return {cutoff, mode_a * mode_b.transpose()};
}

TwoModeState apply_to_mode(const ModeOperator& op, Mode mode, const TwoModeState& state) {
    const auto& c = state.amplitudes();
    require_mode_dim(op, state.cutoff().n_max(mode), "apply_to_mode");
    if (mode == Mode::a) return {state.cutoff(), op.matrix() * c};
    return {state.cutoff(), c * op.matrix().transpose()};
}

Complex expectation(const TwoModeState& state, const ModeOperator& op_a, const ModeOperator& op_b) {
    require_mode_dim(op_a, state.cutoff().n_max_a, "expectation");
    require_mode_dim(op_b, state.cutoff().n_max_b, "expectation");
    const auto& c = state.amplitudes();
    const Matrix image = op_a.matrix() * c * op_b.matrix().transpose();
    return c.conjugate().cwiseProduct(image).sum();
}

Complex expectation(const TwoModeState& state, const ModeOperator& op, Mode mode) {
    const TwoModeState image = apply_to_mode(op, mode, state);
    return inner(state, image);
}

Complex inner(const TwoModeState& u, const TwoModeState& v) {
    require_same_cutoff(u, v, "inner");
    return u.amplitudes().conjugate().cwiseProduct(v.amplitudes()).sum();
}

double norm(const TwoModeState& u) { return u.amplitudes().norm(); }

TwoModeState normalize(const TwoModeState& u) {
    const double n = norm(u);
    if (!(n > 0.0) || !std::isfinite(n)) throw NumericalError("normalize: state has zero norm");
    return {u.cutoff(), u.amplitudes() / n};
}

std::pair<int, int> dominant_index(const TwoModeState& u) {
    const auto& c = u.amplitudes();
    double best = -1.0;
    std::pair<int, int> where{0, 0};
    for (int na = 0; na < c.rows(); ++na) {
        for (int nb = 0; nb < c.cols(); ++nb) {
            const double m = std::abs(c(na, nb));
            if (m > best) {
                best = m;
                where = {na, nb};
            }
        }
    }
    return where;
}

TwoModeState fix_phase_at(const TwoModeState& u, std::pair<int, int> index) {
    const Complex ref = u.amplitudes()(index.first, index.second);
    const double m = std::abs(ref);
    if (m == 0.0) return u;
    return {u.cutoff(), u.amplitudes() * (std::conj(ref) / m)};
}

} // namespace wmecs
