#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "synthcoupling/integrator.hpp"
#include "synthcoupling/model.hpp"
#include "synthcoupling/operators.hpp"

namespace synthcoupling {

/// H(t) = sum_k c_k(t) H_k with fixed operators H_k. A term without a
/// coefficient function is constant.
class TimeDependentOperator {
public:
    using Coefficient = std::function<cplx(double)>;

    struct Term {
        Operator op;
        Coefficient coefficient;
    };

    explicit TimeDependentOperator(Space space) : space_(space) {}
    TimeDependentOperator(const Operator& constant) : space_(constant.space()) { add(constant); }

    TimeDependentOperator& add(Operator op, Coefficient coefficient = {});

    Operator at(double t) const;
    const Space& space() const { return space_; }
    const std::vector<Term>& terms() const { return terms_; }

private:
    Space space_;
    std::vector<Term> terms_;
};

struct Jump {
    TimeDependentOperator op;
    double rate = 0.0;
};

struct StaticJump {
    Operator op;
    double rate = 0.0;
};

/// A Lindblad generator frozen at one instant.
struct LindbladSnapshot {
    Operator hamiltonian;
    std::vector<StaticJump> jumps;
};

/// drho/dt = -i[H(t), rho] + sum_k rate_k D[L_k(t)] rho, D[x]rho = x rho x^dag - {x^dag x, rho}/2.
struct LindbladSpec {
    TimeDependentOperator hamiltonian;
    std::vector<Jump> jumps;

    void validate() const;
    LindbladSnapshot at(double t) const;
};

struct TimeGrid {
    double t_start = 0.0;
    double t_end = 0.0;
    double dt_out = 1.0;
    double tolerance = 1e-9;

    void validate() const;
    /// t_start, t_start + dt_out, ... and t_end itself.
    std::vector<double> times() const;
};

using ScalarRow = std::map<std::string, double>;
using ScalarSeries = std::map<std::string, std::vector<double>>;

template <class State>
struct Trajectory {
    std::vector<double> times;
    std::vector<State> states; // empty unless requested
    ScalarSeries scalars;
    IntegratorStats stats;

    const std::vector<double>& series(const std::string& name) const { return scalars.at(name); }
};

template <class State>
struct EvolveOptions {
    bool keep_states = true;
    /// Called at every output time; add named scalars to the row.
    std::function<void(double t, const State& state, ScalarRow& row)> observer;
    bool check_invariants = true;
    double max_step = std::numeric_limits<double>::infinity();
};

/// Schrodinger evolution. Reports "norm"; with check_invariants the norm must
/// stay within 1e-8 of 1.
Trajectory<StateVector> evolve_schrodinger(const TimeDependentOperator& hamiltonian, const StateVector& psi0,
                                           const TimeGrid& grid, const EvolveOptions<StateVector>& options = {});

/// Master-equation evolution. Reports "trace" and "purity"; with
/// check_invariants every output must satisfy |Tr rho - 1| <= 1e-6,
/// max|rho - rho^dag| <= 1e-8 and lambda_min(rho) >= -1e-6.
Trajectory<DensityMatrix> evolve_lindblad(const LindbladSpec& spec, const DensityMatrix& rho0, const TimeGrid& grid,
                                          const EvolveOptions<DensityMatrix>& options = {});

// --- superoperators ---------------------------------------------------------

/// Column-major vectorization: vec(rho)[i + j d] = rho(i, j).
Vector vectorize(const DensityMatrix& rho);
DensityMatrix unvectorize(const Vector& v, Space space);

struct Liouvillian {
    Matrix matrix; // d^2 x d^2, vec(drho/dt) = L vec(rho)
    Space space;
};

Liouvillian build_liouvillian(const Operator& hamiltonian, const std::vector<StaticJump>& jumps);
inline Liouvillian build_liouvillian(const LindbladSnapshot& s) { return build_liouvillian(s.hamiltonian, s.jumps); }

/// Dense-path right-hand side, used to cross-check the sparse one.
DensityMatrix lindblad_rhs(const LindbladSnapshot& generator, const DensityMatrix& rho);

struct SteadyStateOptions {
    bool check_uniqueness = true;
    double uniqueness_gap = 1e-8;
    double residual_tol = 1e-10;
};

/// Unique null vector of L normalized to a density matrix. Throws
/// NumericalError listing the smallest |eigenvalues| if the null space is
/// degenerate or absent.
DensityMatrix steady_state(const Liouvillian& liouvillian, const SteadyStateOptions& options = {});

// --- model-specific generators ----------------------------------------------

/// Lab-frame Hamiltonian with lambda(t) = delta_c tanh 2r(t).
TimeDependentOperator lab_hamiltonian(const ModelParams& params, const DriveSchedule& schedule,
                                      const HilbertSpec& spec);

struct SqueezedTerms {
    bool err = true;
    bool da = true;
};

/// H^S(t) = H_Rabi(t) + H_Err(t) + H_DA(t) (optionally dropping H_Err / H_DA).
TimeDependentOperator squeezed_frame_hamiltonian(const ModelParams& params, const DriveSchedule& schedule,
                                                 const HilbertSpec& spec, SqueezedTerms terms = {});

/// Jumps {(a, kappa), (sigma_-, gamma)} with the lab-frame Hamiltonian.
LindbladSpec lindblad_lab_spec(const ModelParams& params, const DriveSchedule& schedule, const HilbertSpec& spec);

/// Exact image of the lab-frame master equation under U_S[r(t)]: H^S(t) and
/// jumps {(cosh r a + sinh r a^dag, kappa), (sigma_-, gamma)}.
LindbladSpec lindblad_squeezed_frame_spec(const ModelParams& params, const DriveSchedule& schedule,
                                          const HilbertSpec& spec);

/// Static squeezed-frame generator for the absorption spectrum: H_Rabi + H_Err
/// at r, with vacuum-form jumps {(a, kappa), (sigma_-, gamma)} (the cavity is
/// fed squeezed vacuum matching r).
LindbladSnapshot squeezed_vacuum_input_generator(const ModelParams& params, double r, const HilbertSpec& spec);

} // namespace synthcoupling
