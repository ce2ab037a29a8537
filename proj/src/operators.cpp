#include "synthcoupling/operators.hpp"

#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

namespace synthcoupling {

HilbertSpec::HilbertSpec(int fock_cutoff) : fock_cutoff_(fock_cutoff)
{
    if (fock_cutoff < 2)
        throw ConfigError("Fock cutoff must be at least 2, got " + std::to_string(fock_cutoff));
}

int Space::dim() const
{
    switch (kind_) {
    case Kind::cavity:
        return fock_cutoff_;
    case Kind::qubit:
        return HilbertSpec::qubit_dim;
    case Kind::composite:
        return HilbertSpec::qubit_dim * fock_cutoff_;
    }
    return 0;
}

HilbertSpec Space::hilbert() const
{
    if (kind_ == Kind::qubit)
        throw DimensionError("qubit space carries no Fock cutoff");
    return HilbertSpec(fock_cutoff_);
}

std::string Space::describe() const
{
    switch (kind_) {
    case Kind::cavity:
        return "cavity(N_F=" + std::to_string(fock_cutoff_) + ")";
    case Kind::qubit:
        return "qubit";
    case Kind::composite:
        return "cavity(N_F=" + std::to_string(fock_cutoff_) + ")xqubit";
    }
    return "?";
}

void require_same_space(const Space& a, const Space& b, const char* what)
{
    if (!(a == b))
        throw DimensionError(std::string(what) + ": space mismatch " + a.describe() + " vs " + b.describe());
}

// --- Operator ---------------------------------------------------------------

Operator::Operator(Matrix entries, Space space) : entries_(std::move(entries)), space_(space)
{
    if (entries_.rows() != entries_.cols())
        throw DimensionError("operator matrix must be square");
    if (entries_.rows() != space_.dim())
        throw DimensionError("operator dimension " + std::to_string(entries_.rows()) + " does not match " +
                             space_.describe());
}

Operator Operator::identity(Space space)
{
    return Operator(Matrix::Identity(space.dim(), space.dim()), space);
}

Operator Operator::zero(Space space)
{
    return Operator(Matrix::Zero(space.dim(), space.dim()), space);
}

double Operator::hermiticity_defect() const
{
    return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
}

double Operator::max_abs() const
{
    return entries_.cwiseAbs().maxCoeff();
}

Operator& Operator::operator+=(const Operator& other)
{
    require_same_space(space_, other.space_, "operator +");
    entries_ += other.entries_;
    return *this;
}

Operator& Operator::operator-=(const Operator& other)
{
    require_same_space(space_, other.space_, "operator -");
    entries_ -= other.entries_;
    return *this;
}

Operator& Operator::operator*=(cplx s)
{
    entries_ *= s;
    return *this;
}

Operator operator*(const Operator& a, const Operator& b)
{
    require_same_space(a.space(), b.space(), "operator *");
    return Operator(a.matrix() * b.matrix(), a.space());
}

Operator commutator(const Operator& a, const Operator& b)
{
    return a * b - b * a;
}

// --- states -----------------------------------------------------------------

StateVector::StateVector(Vector amplitudes, Space space) : amplitudes_(std::move(amplitudes)), space_(space)
{
    if (amplitudes_.size() != space_.dim())
        throw DimensionError("state dimension does not match " + space_.describe());
}

StateVector StateVector::basis(const HilbertSpec& spec, int fock, int qubit)
{
    if (fock < 0 || fock >= spec.fock_cutoff() || qubit < 0 || qubit >= HilbertSpec::qubit_dim)
        throw DimensionError("basis state outside the truncated space");
    Vector v = Vector::Zero(spec.dim());
    v(spec.index(fock, qubit)) = 1.0;
    return StateVector(std::move(v), Space::composite(spec));
}

StateVector operator*(const Operator& op, const StateVector& psi)
{
    require_same_space(op.space(), psi.space(), "operator * state");
    return StateVector(op.matrix() * psi.amplitudes(), psi.space());
}

cplx inner(const StateVector& bra, const StateVector& ket)
{
    require_same_space(bra.space(), ket.space(), "inner product");
    return bra.amplitudes().dot(ket.amplitudes());
}

DensityMatrix::DensityMatrix(Matrix entries, Space space) : entries_(std::move(entries)), space_(space)
{
    if (entries_.rows() != entries_.cols() || entries_.rows() != space_.dim())
        throw DimensionError("density matrix dimension does not match " + space_.describe());
}

DensityMatrix DensityMatrix::pure(const StateVector& psi)
{
    return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint(), psi.space());
}

DensityMatrix DensityMatrix::maximally_mixed(Space space)
{
    const int d = space.dim();
    return DensityMatrix(Matrix::Identity(d, d) / static_cast<double>(d), space);
}

double DensityMatrix::purity() const
{
    // Tr[rho^2] = sum |rho_ij|^2 for Hermitian rho
    return entries_.squaredNorm();
}

double DensityMatrix::hermiticity_defect() const
{
    return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const
{
    const Matrix herm = 0.5 * (entries_ + entries_.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(herm, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

cplx DensityMatrix::expectation(const Operator& op) const
{
    require_same_space(space_, op.space(), "expectation");
    // Tr[rho A] = sum_ij rho_ij A_ji
    return entries_.cwiseProduct(op.matrix().transpose()).sum();
}

DensityMatrix conjugate(const Operator& u, const DensityMatrix& rho)
{
    require_same_space(u.space(), rho.space(), "conjugate");
    return DensityMatrix(u.matrix() * rho.matrix() * u.matrix().adjoint(), rho.space());
}

void validate_density(const DensityMatrix& rho, double hermiticity_tol, double trace_tol, double eigenvalue_tol)
{
    std::ostringstream problems;
    const double herm = rho.hermiticity_defect();
    if (herm > hermiticity_tol)
        problems << " hermiticity defect " << herm << ";";
    const cplx tr = rho.trace();
    if (std::abs(tr - 1.0) > trace_tol)
        problems << " trace " << tr.real() << "+" << tr.imag() << "i;";
    const double lmin = rho.min_eigenvalue();
    if (lmin < -eigenvalue_tol)
        problems << " min eigenvalue " << lmin << ";";
    if (!problems.str().empty())
        throw NumericalError("invalid density matrix:" + problems.str());
}

// --- ladder and Pauli operators --------------------------------------------

Operator annihilation(int fock_cutoff)
{
    const Space space = Space::cavity(HilbertSpec(fock_cutoff).fock_cutoff());
    Matrix a = Matrix::Zero(fock_cutoff, fock_cutoff);
    for (int n = 1; n < fock_cutoff; ++n)
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return Operator(std::move(a), space);
}

Operator number_operator(int fock_cutoff)
{
    const Space space = Space::cavity(HilbertSpec(fock_cutoff).fock_cutoff());
    Matrix n = Matrix::Zero(fock_cutoff, fock_cutoff);
    for (int k = 0; k < fock_cutoff; ++k)
        n(k, k) = static_cast<double>(k);
    return Operator(std::move(n), space);
}

QubitOperators qubit_operators()
{
    using namespace qubit_index;
    const Space q = Space::qubit();
    Matrix sm = Matrix::Zero(2, 2);
    sm(down, up) = 1.0;
    Matrix sz = Matrix::Zero(2, 2);
    sz(up, up) = 1.0;
    sz(down, down) = -1.0;
    Operator sigma_minus(sm, q);
    Operator sigma_plus = sigma_minus.adjoint();
    Operator sigma_x = sigma_minus + sigma_plus;
    return {sigma_minus, sigma_plus, Operator(sz, q), sigma_x};
}

Operator embed(const Operator& op, Factor which, const HilbertSpec& spec)
{
    const int nf = spec.fock_cutoff();
    const int q = HilbertSpec::qubit_dim;
    Matrix out = Matrix::Zero(spec.dim(), spec.dim());
    if (which == Factor::cavity) {
        require_same_space(op.space(), Space::cavity(nf), "embed(cavity)");
        for (int m = 0; m < nf; ++m)
            for (int n = 0; n < nf; ++n) {
                const cplx v = op.matrix()(m, n);
                if (v == cplx{})
                    continue;
                for (int s = 0; s < q; ++s)
                    out(spec.index(m, s), spec.index(n, s)) = v;
            }
    } else {
        require_same_space(op.space(), Space::qubit(), "embed(qubit)");
        for (int m = 0; m < nf; ++m)
            for (int s = 0; s < q; ++s)
                for (int t = 0; t < q; ++t)
                    out(spec.index(m, s), spec.index(m, t)) = op.matrix()(s, t);
    }
    return Operator(std::move(out), Space::composite(spec));
}

CompositeOperators::CompositeOperators(const HilbertSpec& s)
    : spec(s),
      a(embed(annihilation(s), Factor::cavity, s)),
      a_dag(a.adjoint()),
      n(embed(number_operator(s.fock_cutoff()), Factor::cavity, s)),
      sigma_minus(embed(qubit_operators().sigma_minus, Factor::qubit, s)),
      sigma_plus(sigma_minus.adjoint()),
      sigma_z(embed(qubit_operators().sigma_z, Factor::qubit, s)),
      sigma_x(sigma_minus + sigma_plus),
      identity(Operator::identity(Space::composite(s)))
{
}

// --- matrix functions and bipartite utilities ------------------------------

Matrix matrix_exponential(const Matrix& a)
{
    if (!a.allFinite())
        throw NumericalError("matrix_exponential: non-finite input");
    return a.exp();
}

Operator matrix_exponential(const Operator& a)
{
    return Operator(matrix_exponential(a.matrix()), a.space());
}

DensityMatrix partial_trace(const DensityMatrix& rho, Factor keep)
{
    if (rho.space().kind() != Space::Kind::composite)
        throw DimensionError("partial_trace expects a composite state");
    const HilbertSpec spec = rho.space().hilbert();
    const int nf = spec.fock_cutoff();
    const int q = HilbertSpec::qubit_dim;
    const Matrix& m = rho.matrix();
    if (keep == Factor::cavity) {
        Matrix out = Matrix::Zero(nf, nf);
        for (int i = 0; i < nf; ++i)
            for (int j = 0; j < nf; ++j)
                for (int s = 0; s < q; ++s)
                    out(i, j) += m(spec.index(i, s), spec.index(j, s));
        return DensityMatrix(std::move(out), Space::cavity(nf));
    }
    Matrix out = Matrix::Zero(q, q);
    for (int s = 0; s < q; ++s)
        for (int t = 0; t < q; ++t)
            for (int n = 0; n < nf; ++n)
                out(s, t) += m(spec.index(n, s), spec.index(n, t));
    return DensityMatrix(std::move(out), Space::qubit());
}

Operator partial_transpose(const DensityMatrix& rho, Factor which)
{
    if (rho.space().kind() != Space::Kind::composite)
        throw DimensionError("partial_transpose expects a composite state");
    if (which != Factor::qubit)
        throw ConfigError("partial_transpose: only the qubit factor is supported");
    const HilbertSpec spec = rho.space().hilbert();
    const int nf = spec.fock_cutoff();
    const int q = HilbertSpec::qubit_dim;
    const Matrix& m = rho.matrix();
    Matrix out(spec.dim(), spec.dim());
    for (int i = 0; i < nf; ++i)
        for (int j = 0; j < nf; ++j)
            for (int s = 0; s < q; ++s)
                for (int t = 0; t < q; ++t)
                    out(spec.index(i, s), spec.index(j, t)) = m(spec.index(i, t), spec.index(j, s));
    return Operator(std::move(out), rho.space());
}

double trace_norm(const Operator& a, double hermiticity_tol)
{
    const double defect = a.hermiticity_defect();
    if (defect > hermiticity_tol)
        throw NumericalError("trace_norm: operator not Hermitian (defect " + std::to_string(defect) + ")");
    const Matrix herm = 0.5 * (a.matrix() + a.matrix().adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(herm, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().cwiseAbs().sum();
}

} // namespace synthcoupling
