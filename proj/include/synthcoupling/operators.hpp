#pragma once

// Dense operators on a truncated cavity (Fock levels 0..N_F-1) tensored with
// a qubit. The composite ordering is cavity-major everywhere in this project:
//
//     composite index = fock_index * 2 + qubit_index
//
// and the qubit basis is ordered { |+z>, |-z> }, so |-z> (the ground state)
// has qubit index 1 and sigma_z = diag(+1, -1).

#include <complex>
#include <string>

#include <Eigen/Dense>

#include "synthcoupling/errors.hpp"

namespace synthcoupling {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr cplx I{0.0, 1.0};

struct HilbertSpec {
    static constexpr int qubit_dim = 2;

    explicit HilbertSpec(int fock_cutoff);

    int fock_cutoff() const { return fock_cutoff_; }
    int dim() const { return qubit_dim * fock_cutoff_; }
    int index(int fock, int qubit) const { return fock * qubit_dim + qubit; }

    friend bool operator==(const HilbertSpec&, const HilbertSpec&) = default;

private:
    int fock_cutoff_;
};

namespace qubit_index {
inline constexpr int up = 0;   // |+z>
inline constexpr int down = 1; // |-z>
} // namespace qubit_index

enum class Factor { cavity, qubit };

/// Which space an operator or state acts on: one factor, or the composite.
class Space {
public:
    enum class Kind { cavity, qubit, composite };

    static Space cavity(int fock_cutoff) { return Space(Kind::cavity, fock_cutoff); }
    static Space qubit() { return Space(Kind::qubit, 0); }
    static Space composite(const HilbertSpec& spec) { return Space(Kind::composite, spec.fock_cutoff()); }

    Kind kind() const { return kind_; }
    int fock_cutoff() const { return fock_cutoff_; }
    int dim() const;
    HilbertSpec hilbert() const;
    std::string describe() const;

    friend bool operator==(const Space&, const Space&) = default;

private:
    Space(Kind kind, int fock_cutoff) : kind_(kind), fock_cutoff_(fock_cutoff) {}

    Kind kind_;
    int fock_cutoff_;
};

void require_same_space(const Space& a, const Space& b, const char* what);

class Operator {
public:
    Operator(Matrix entries, Space space);

    static Operator identity(Space space);
    static Operator zero(Space space);

    const Matrix& matrix() const { return entries_; }
    const Space& space() const { return space_; }
    int dim() const { return static_cast<int>(entries_.rows()); }

    Operator adjoint() const { return Operator(entries_.adjoint(), space_); }
    /// max |A - A^dagger|
    double hermiticity_defect() const;
    double max_abs() const;

    Operator& operator+=(const Operator& other);
    Operator& operator-=(const Operator& other);
    Operator& operator*=(cplx s);

    friend Operator operator+(Operator a, const Operator& b) { return a += b; }
    friend Operator operator-(Operator a, const Operator& b) { return a -= b; }
    friend Operator operator*(cplx s, Operator a) { return a *= s; }
    friend Operator operator*(Operator a, cplx s) { return a *= s; }
    friend Operator operator*(const Operator& a, const Operator& b);

private:
    Matrix entries_;
    Space space_;
};

Operator commutator(const Operator& a, const Operator& b);

class StateVector {
public:
    StateVector(Vector amplitudes, Space space);

    static StateVector basis(const HilbertSpec& spec, int fock, int qubit);

    const Vector& amplitudes() const { return amplitudes_; }
    const Space& space() const { return space_; }
    int dim() const { return static_cast<int>(amplitudes_.size()); }
    double norm() const { return amplitudes_.norm(); }

private:
    Vector amplitudes_;
    Space space_;
};

StateVector operator*(const Operator& op, const StateVector& psi);
cplx inner(const StateVector& bra, const StateVector& ket);

class DensityMatrix {
public:
    DensityMatrix(Matrix entries, Space space);

    static DensityMatrix pure(const StateVector& psi);
    static DensityMatrix maximally_mixed(Space space);

    const Matrix& matrix() const { return entries_; }
    const Space& space() const { return space_; }
    int dim() const { return static_cast<int>(entries_.rows()); }

    cplx trace() const { return entries_.trace(); }
    double purity() const;
    double hermiticity_defect() const;
    double min_eigenvalue() const;
    cplx expectation(const Operator& op) const;

private:
    Matrix entries_;
    Space space_;
};

/// Conjugation U rho U^dagger.
DensityMatrix conjugate(const Operator& u, const DensityMatrix& rho);

/// Throws NumericalError when rho is not Hermitian, unit-trace and positive
/// within the given tolerances.
void validate_density(const DensityMatrix& rho, double hermiticity_tol = 1e-10, double trace_tol = 1e-8,
                      double eigenvalue_tol = 1e-8);

// --- ladder and Pauli operators --------------------------------------------

/// Truncated annihilation operator on the cavity factor: <n-1|a|n> = sqrt(n).
Operator annihilation(int fock_cutoff);
inline Operator annihilation(const HilbertSpec& spec) { return annihilation(spec.fock_cutoff()); }
Operator number_operator(int fock_cutoff);

struct QubitOperators {
    Operator sigma_minus;
    Operator sigma_plus;
    Operator sigma_z;
    Operator sigma_x;
};

QubitOperators qubit_operators();

/// Tensor the factor operator with the identity on the other factor.
Operator embed(const Operator& op, Factor which, const HilbertSpec& spec);

/// Convenience for operators used throughout the model: a, a^dagger,
/// sigma_-/+, sigma_z, sigma_x already embedded in the composite space.
struct CompositeOperators {
    explicit CompositeOperators(const HilbertSpec& spec);

    HilbertSpec spec;
    Operator a;
    Operator a_dag;
    Operator n;
    Operator sigma_minus;
    Operator sigma_plus;
    Operator sigma_z;
    Operator sigma_x;
    Operator identity;
};

// --- matrix functions and bipartite utilities ------------------------------

Operator matrix_exponential(const Operator& a);
Matrix matrix_exponential(const Matrix& a);

DensityMatrix partial_trace(const DensityMatrix& rho, Factor keep);

/// Partial transpose of a composite density matrix; only the qubit factor is supported.
Operator partial_transpose(const DensityMatrix& rho, Factor which = Factor::qubit);

/// Sum of |eigenvalues| of a Hermitian operator.
double trace_norm(const Operator& a, double hermiticity_tol = 1e-8);

} // namespace synthcoupling
