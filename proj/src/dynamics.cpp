#include "synthcoupling/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/Sparse>
#include <unsupported/Eigen/KroneckerProduct>

namespace synthcoupling {

TimeDependentOperator& TimeDependentOperator::add(Operator op, Coefficient coefficient)
{
    require_same_space(space_, op.space(), "TimeDependentOperator::add");
    terms_.push_back({std::move(op), std::move(coefficient)});
    return *this;
}

Operator TimeDependentOperator::at(double t) const
{
    Operator sum = Operator::zero(space_);
    for (const auto& term : terms_)
        sum += term.coefficient ? term.coefficient(t) * term.op : term.op;
    return sum;
}

void LindbladSpec::validate() const
{
    for (const auto& jump : jumps) {
        if (!std::isfinite(jump.rate) || jump.rate < 0.0)
            throw ConfigError("jump rates must be finite and non-negative");
        require_same_space(hamiltonian.space(), jump.op.space(), "LindbladSpec");
    }
}

LindbladSnapshot LindbladSpec::at(double t) const
{
    LindbladSnapshot s{hamiltonian.at(t), {}};
    for (const auto& jump : jumps)
        s.jumps.push_back({jump.op.at(t), jump.rate});
    return s;
}

void TimeGrid::validate() const
{
    if (!std::isfinite(t_start) || !std::isfinite(t_end) || !(t_end > t_start))
        throw ConfigError("time grid needs t_end > t_start");
    if (!std::isfinite(dt_out) || !(dt_out > 0.0))
        throw ConfigError("time grid needs dt_out > 0");
    if (!(tolerance > 0.0) || tolerance >= 1.0)
        throw ConfigError("integrator tolerance must lie in (0, 1)");
}

std::vector<double> TimeGrid::times() const
{
    validate();
    const double span = t_end - t_start;
    const auto steps = static_cast<long>(std::floor(span / dt_out + 1e-9));
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(steps) + 2);
    for (long k = 0; k <= steps; ++k)
        out.push_back(t_start + static_cast<double>(k) * dt_out);
    if (std::abs(out.back() - t_end) > 1e-9 * std::max(1.0, std::abs(t_end)))
        out.push_back(t_end);
    else
        out.back() = t_end;
    return out;
}

namespace {

using SparseMatrix = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;
using Coefficient = TimeDependentOperator::Coefficient;

/// sum_k c_k(t) M_k stored on the union sparsity pattern, refreshed in place.
class CompiledSum {
public:
    CompiledSum(const std::vector<std::pair<Matrix, Coefficient>>& terms, Eigen::Index dim)
    {
        std::vector<Eigen::Triplet<cplx>> pattern;
        for (Eigen::Index i = 0; i < dim; ++i)
            for (Eigen::Index j = 0; j < dim; ++j)
                for (const auto& term : terms)
                    if (term.first(i, j) != cplx(0.0)) {
                        pattern.emplace_back(i, j, cplx(1.0));
                        break;
                    }
        sum_.resize(dim, dim);
        sum_.setFromTriplets(pattern.begin(), pattern.end());
        sum_.makeCompressed();

        const Eigen::Index nnz = sum_.nonZeros();
        constant_ = Vector::Zero(nnz);
        for (const auto& [matrix, coefficient] : terms) {
            Vector v(nnz);
            Eigen::Index p = 0;
            for (Eigen::Index row = 0; row < sum_.outerSize(); ++row)
                for (SparseMatrix::InnerIterator it(sum_, row); it; ++it)
                    v[p++] = matrix(it.row(), it.col());
            if (coefficient) {
                values_.push_back(std::move(v));
                coefficients_.push_back(coefficient);
            } else {
                constant_ += v;
            }
        }
        if (values_.empty())
            refresh(0.0);
    }

    const SparseMatrix& at(double t)
    {
        if (!values_.empty())
            refresh(t);
        return sum_;
    }

private:
    void refresh(double t)
    {
        Eigen::Map<Vector> out(sum_.valuePtr(), sum_.nonZeros());
        out = constant_;
        for (std::size_t k = 0; k < values_.size(); ++k)
            out += coefficients_[k](t) * values_[k];
    }

    SparseMatrix sum_;
    Vector constant_;
    std::vector<Vector> values_;
    std::vector<Coefficient> coefficients_;
};

std::vector<std::pair<Matrix, Coefficient>> raw_terms(const TimeDependentOperator& op)
{
    std::vector<std::pair<Matrix, Coefficient>> out;
    for (const auto& term : op.terms())
        out.emplace_back(term.op.matrix(), term.coefficient);
    return out;
}

Coefficient product(const Coefficient& a, const Coefficient& b, cplx scale)
{
    if (!a && !b)
        return {};
    return [a, b, scale](double t) {
        const cplx ca = a ? std::conj(a(t)) : cplx(1.0);
        const cplx cb = b ? b(t) : cplx(1.0);
        return scale * ca * cb;
    };
}

/// H_eff(t) = H(t) - (i/2) sum_j rate_j L_j(t)^dag L_j(t), expanded term by term.
std::vector<std::pair<Matrix, Coefficient>> effective_hamiltonian_terms(const LindbladSpec& spec)
{
    auto terms = raw_terms(spec.hamiltonian);
    for (const auto& jump : spec.jumps) {
        if (jump.rate == 0.0)
            continue;
        for (const auto& p : jump.op.terms())
            for (const auto& q : jump.op.terms()) {
                const Matrix m = (-0.5 * I * jump.rate) * (p.op.matrix().adjoint() * q.op.matrix());
                if (!p.coefficient && !q.coefficient)
                    terms.emplace_back(m, Coefficient{});
                else
                    terms.emplace_back(m, product(p.coefficient, q.coefficient, 1.0));
            }
    }
    return terms;
}

IntegratorOptions integrator_options(const TimeGrid& grid, double max_step)
{
    IntegratorOptions opt;
    opt.rtol = grid.tolerance;
    opt.atol = 1e-2 * grid.tolerance;
    opt.max_step = max_step;
    return opt;
}

void push_row(ScalarSeries& series, const ScalarRow& row, std::size_t expected_length)
{
    for (const auto& [name, value] : row) {
        auto& s = series[name];
        if (s.size() + 1 != expected_length)
            throw NumericalError("observer reported scalar '" + name + "' at some output times only");
        s.push_back(value);
    }
}

} // namespace

Trajectory<StateVector> evolve_schrodinger(const TimeDependentOperator& hamiltonian, const StateVector& psi0,
                                           const TimeGrid& grid, const EvolveOptions<StateVector>& options)
{
    require_same_space(hamiltonian.space(), psi0.space(), "evolve_schrodinger");
    if (std::abs(psi0.norm() - 1.0) > 1e-10)
        throw ConfigError("evolve_schrodinger: initial state is not normalized");
    const std::vector<double> times = grid.times();
    const Eigen::Index dim = psi0.dim();
    CompiledSum h(raw_terms(hamiltonian), dim);

    Trajectory<StateVector> traj;
    const Space space = psi0.space();
    auto rhs = [&](double t, const Vector& y, Vector& dy) { dy.noalias() = h.at(t) * y; dy *= -I; };
    auto output = [&](double t, const Vector& y) {
        StateVector psi(y, space);
        ScalarRow row;
        row["norm"] = psi.norm();
        if (options.check_invariants && std::abs(row["norm"] - 1.0) > 1e-8) {
            std::ostringstream msg;
            msg << "norm drifted to " << row["norm"] << " at t=" << t << " (tolerance " << grid.tolerance << ")";
            throw NumericalError(msg.str());
        }
        if (options.observer)
            options.observer(t, psi, row);
        traj.times.push_back(t);
        push_row(traj.scalars, row, traj.times.size());
        if (options.keep_states)
            traj.states.push_back(std::move(psi));
    };
    traj.stats = integrate_dopri5(rhs, grid.t_start, psi0.amplitudes(), times, output,
                                  integrator_options(grid, options.max_step));
    return traj;
}

Trajectory<DensityMatrix> evolve_lindblad(const LindbladSpec& spec, const DensityMatrix& rho0, const TimeGrid& grid,
                                          const EvolveOptions<DensityMatrix>& options)
{
    spec.validate();
    require_same_space(spec.hamiltonian.space(), rho0.space(), "evolve_lindblad");
    validate_density(rho0);
    const std::vector<double> times = grid.times();
    const Eigen::Index d = rho0.dim();

    CompiledSum heff(effective_hamiltonian_terms(spec), d);
    struct CompiledJump {
        CompiledSum op;
        double rate;
    };
    std::vector<CompiledJump> jumps;
    for (const auto& jump : spec.jumps)
        if (jump.rate > 0.0)
            jumps.push_back({CompiledSum(raw_terms(jump.op), d), jump.rate});

    Matrix x(d, d), b(d, d), c(d, d);
    // For Hermitian rho the generator is X + X^dag with
    // X = -i H_eff rho + (1/2) sum rate L (L rho)^dag. Returning X + X^dag
    // keeps every stage exactly Hermitian, so round-off cannot build up an
    // anti-Hermitian part over long runs.
    auto rhs = [&](double t, const Vector& y, Vector& dy) {
        Eigen::Map<const Matrix> rho(y.data(), d, d);
        Eigen::Map<Matrix> out(dy.data(), d, d);
        x.noalias() = heff.at(t) * rho;
        x *= -I;
        for (auto& jump : jumps) {
            const SparseMatrix& l = jump.op.at(t);
            b.noalias() = l * rho;
            c = b.adjoint();
            x.noalias() += (0.5 * jump.rate) * (l * c);
        }
        out = x + x.adjoint();
    };

    Trajectory<DensityMatrix> traj;
    const Space space = rho0.space();
    auto output = [&](double t, const Vector& y) {
        DensityMatrix rho(Eigen::Map<const Matrix>(y.data(), d, d), space);
        ScalarRow row;
        row["trace"] = rho.trace().real();
        row["purity"] = rho.purity();
        if (options.check_invariants) {
            const double trace_err = std::abs(rho.trace() - 1.0);
            const double herm = rho.hermiticity_defect();
            const double min_eig = rho.min_eigenvalue();
            if (trace_err > 1e-6 || herm > 1e-8 || min_eig < -1e-6) {
                std::ostringstream msg;
                msg << "density matrix left the physical set at t=" << t << ": |Tr-1|=" << trace_err
                    << ", hermiticity defect=" << herm << ", min eigenvalue=" << min_eig
                    << " (limits 1e-6, 1e-8, -1e-6)";
                throw NumericalError(msg.str());
            }
        }
        if (options.observer)
            options.observer(t, rho, row);
        traj.times.push_back(t);
        push_row(traj.scalars, row, traj.times.size());
        if (options.keep_states)
            traj.states.push_back(std::move(rho));
    };
    const Vector y0 = Eigen::Map<const Vector>(rho0.matrix().data(), d * d);
    traj.stats = integrate_dopri5(rhs, grid.t_start, y0, times, output, integrator_options(grid, options.max_step));
    return traj;
}

Vector vectorize(const DensityMatrix& rho)
{
    return Eigen::Map<const Vector>(rho.matrix().data(), rho.matrix().size());
}

DensityMatrix unvectorize(const Vector& v, Space space)
{
    const Eigen::Index d = space.dim();
    if (v.size() != d * d)
        throw DimensionError("unvectorize: vector length does not match the space");
    return DensityMatrix(Eigen::Map<const Matrix>(v.data(), d, d), space);
}

Liouvillian build_liouvillian(const Operator& hamiltonian, const std::vector<StaticJump>& jumps)
{
    const Space space = hamiltonian.space();
    const Eigen::Index d = hamiltonian.dim();
    Matrix heff = hamiltonian.matrix();
    for (const auto& jump : jumps) {
        require_same_space(space, jump.op.space(), "build_liouvillian");
        if (!std::isfinite(jump.rate) || jump.rate < 0.0)
            throw ConfigError("jump rates must be finite and non-negative");
        heff += (-0.5 * I * jump.rate) * (jump.op.matrix().adjoint() * jump.op.matrix());
    }
    const Matrix id = Matrix::Identity(d, d);
    // vec(A X B) = (B^T kron A) vec(X)
    Matrix l = -I * Matrix(Eigen::kroneckerProduct(id, heff)) + I * Matrix(Eigen::kroneckerProduct(heff.conjugate(), id));
    for (const auto& jump : jumps)
        if (jump.rate > 0.0)
            l += jump.rate * Matrix(Eigen::kroneckerProduct(jump.op.matrix().conjugate(), jump.op.matrix()));
    return {std::move(l), space};
}

DensityMatrix lindblad_rhs(const LindbladSnapshot& generator, const DensityMatrix& rho)
{
    const Matrix& h = generator.hamiltonian.matrix();
    const Matrix& r = rho.matrix();
    Matrix out = -I * (h * r - r * h);
    for (const auto& jump : generator.jumps) {
        const Matrix& l = jump.op.matrix();
        const Matrix ldl = l.adjoint() * l;
        out += jump.rate * (l * r * l.adjoint() - 0.5 * (ldl * r + r * ldl));
    }
    return DensityMatrix(std::move(out), rho.space());
}

DensityMatrix steady_state(const Liouvillian& liouvillian, const SteadyStateOptions& options)
{
    const Matrix& l = liouvillian.matrix;
    const Eigen::Index n = l.rows();
    const Eigen::Index d = liouvillian.space.dim();
    if (n != d * d)
        throw DimensionError("steady_state: Liouvillian size does not match its space");

    if (options.check_uniqueness) {
        Eigen::ComplexEigenSolver<Matrix> es(l, false);
        std::vector<double> mags(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i)
            mags[static_cast<std::size_t>(i)] = std::abs(es.eigenvalues()[i]);
        std::sort(mags.begin(), mags.end());
        if (n < 2 || mags[1] <= options.uniqueness_gap || mags[0] > 1e-6) {
            std::ostringstream msg;
            msg << "steady state is not unique or does not exist; smallest |eigenvalues|:";
            for (std::size_t i = 0; i < std::min<std::size_t>(4, mags.size()); ++i)
                msg << ' ' << mags[i];
            throw NumericalError(msg.str());
        }
    }

    // Trace is conserved, so the rows for the diagonal entries are linearly
    // dependent; swap one for the normalization constraint.
    Matrix m = l;
    m.row(0).setZero();
    for (Eigen::Index i = 0; i < d; ++i)
        m(0, i * (d + 1)) = 1.0;
    Vector rhs = Vector::Zero(n);
    rhs[0] = 1.0;
    const Vector x = m.fullPivLu().solve(rhs);

    Matrix rho = Eigen::Map<const Matrix>(x.data(), d, d);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace();
    DensityMatrix out(std::move(rho), liouvillian.space);
    const double residual = (l * vectorize(out)).cwiseAbs().maxCoeff();
    if (!(residual <= options.residual_tol)) {
        std::ostringstream msg;
        msg << "steady state residual " << residual << " exceeds " << options.residual_tol;
        throw NumericalError(msg.str());
    }
    validate_density(out, 1e-10, 1e-8, 1e-8);
    return out;
}

// --- model-specific generators ----------------------------------------------

namespace {

const DriveRamp* as_ramp(const DriveSchedule& schedule)
{
    return std::get_if<DriveRamp>(&schedule);
}

Coefficient squeeze_coefficient(const DriveRamp& ramp, double (*f)(double r, double r_dot, const ModelParams&),
                                const ModelParams& params)
{
    return [ramp, f, params](double t) {
        const SqueezeValue s = ramp_r(t, ramp);
        return cplx(f(s.r, s.r_dot, params));
    };
}

} // namespace

TimeDependentOperator lab_hamiltonian(const ModelParams& params, const DriveSchedule& schedule,
                                      const HilbertSpec& spec)
{
    params.validate();
    const CompositeOperators ops(spec);
    TimeDependentOperator h(Space::composite(spec));
    const Operator fixed = params.delta_c * ops.n + (0.5 * params.delta_q) * ops.sigma_z +
                           params.g * (ops.a_dag * ops.sigma_minus + ops.sigma_plus * ops.a);
    const Operator pump = -0.5 * (ops.a_dag * ops.a_dag + ops.a * ops.a);
    if (const DriveRamp* ramp = as_ramp(schedule)) {
        ramp->validate();
        h.add(fixed);
        h.add(pump, squeeze_coefficient(*ramp,
                                        [](double r, double, const ModelParams& p) { return lambda_from_r(r, p.delta_c); },
                                        params));
    } else {
        const FrameSnapshot snap = snapshot(0.0, params, schedule);
        h.add(fixed + snap.lambda * pump);
    }
    return h;
}

TimeDependentOperator squeezed_frame_hamiltonian(const ModelParams& params, const DriveSchedule& schedule,
                                                 const HilbertSpec& spec, SqueezedTerms terms)
{
    params.validate();
    const SqueezedFrameBasis b = squeezed_frame_basis(spec);
    TimeDependentOperator h(Space::composite(spec));
    const DriveRamp* ramp = as_ramp(schedule);
    if (!ramp) {
        const SqueezedFrameParts parts = hamiltonian_squeezed_parts(snapshot(0.0, params, schedule), params, spec);
        h.add(terms.err ? parts.rabi + parts.err : parts.rabi);
        return h;
    }
    ramp->validate();
    if (params.delta_q != 0.0)
        h.add(params.delta_q * b.half_sz);
    h.add(b.n, squeeze_coefficient(*ramp,
                                   [](double r, double, const ModelParams& p) { return effective_cavity_frequency(r, p.delta_c); },
                                   params));
    if (params.g != 0.0) {
        h.add(b.rabi_coupling, squeeze_coefficient(*ramp,
                                                   [](double r, double, const ModelParams& p) { return p.g * std::exp(r); },
                                                   params));
        if (terms.err)
            h.add(b.err_coupling, squeeze_coefficient(*ramp,
                                                      [](double r, double, const ModelParams& p) { return p.g * std::exp(-r); },
                                                      params));
    }
    if (terms.da)
        h.add(b.da_generator, squeeze_coefficient(*ramp, [](double, double r_dot, const ModelParams&) { return r_dot; },
                                                  params));
    return h;
}

LindbladSpec lindblad_lab_spec(const ModelParams& params, const DriveSchedule& schedule, const HilbertSpec& spec)
{
    const CompositeOperators ops(spec);
    LindbladSpec out{lab_hamiltonian(params, schedule, spec), {}};
    if (params.kappa > 0.0)
        out.jumps.push_back({TimeDependentOperator(ops.a), params.kappa});
    if (params.gamma > 0.0)
        out.jumps.push_back({TimeDependentOperator(ops.sigma_minus), params.gamma});
    return out;
}

LindbladSpec lindblad_squeezed_frame_spec(const ModelParams& params, const DriveSchedule& schedule,
                                          const HilbertSpec& spec)
{
    const CompositeOperators ops(spec);
    LindbladSpec out{squeezed_frame_hamiltonian(params, schedule, spec), {}};
    if (params.kappa > 0.0) {
        // U_S a U_S^dag = cosh r a + sinh r a^dag
        TimeDependentOperator cavity_jump(Space::composite(spec));
        if (const DriveRamp* ramp = as_ramp(schedule)) {
            cavity_jump.add(ops.a, squeeze_coefficient(*ramp, [](double r, double, const ModelParams&) { return std::cosh(r); },
                                                       params));
            cavity_jump.add(ops.a_dag, squeeze_coefficient(
                                           *ramp, [](double r, double, const ModelParams&) { return std::sinh(r); }, params));
        } else {
            const double r = std::get<StaticDrive>(schedule).r;
            cavity_jump.add(std::cosh(r) * ops.a + std::sinh(r) * ops.a_dag);
        }
        out.jumps.push_back({std::move(cavity_jump), params.kappa});
    }
    if (params.gamma > 0.0)
        out.jumps.push_back({TimeDependentOperator(ops.sigma_minus), params.gamma});
    return out;
}

LindbladSnapshot squeezed_vacuum_input_generator(const ModelParams& params, double r, const HilbertSpec& spec)
{
    params.validate();
    const CompositeOperators ops(spec);
    const SqueezedFrameParts parts = hamiltonian_squeezed_parts(snapshot(r, 0.0, params), params, spec);
    LindbladSnapshot out{parts.rabi + parts.err, {}};
    if (params.kappa > 0.0)
        out.jumps.push_back({ops.a, params.kappa});
    if (params.gamma > 0.0)
        out.jumps.push_back({ops.sigma_minus, params.gamma});
    return out;
}

} // namespace synthcoupling
