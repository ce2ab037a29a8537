#include "synthcoupling/model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace synthcoupling {

namespace {

bool finite(double x) { return std::isfinite(x); }

} // namespace

void ModelParams::validate() const
{
    if (!finite(delta_c) || delta_c <= 0.0)
        throw ConfigError("delta_c must be positive (negative detunings are not supported)");
    if (!finite(delta_q))
        throw ConfigError("delta_q must be finite");
    if (!finite(g) || g < 0.0)
        throw ConfigError("g must be non-negative");
    if (!finite(kappa) || kappa < 0.0)
        throw ConfigError("kappa must be non-negative");
    if (!finite(gamma) || gamma < 0.0)
        throw ConfigError("gamma must be non-negative");
}

void DriveRamp::validate() const
{
    if (!finite(r_max) || r_max < 0.0)
        throw ConfigError("r_max must be non-negative");
    if (!finite(tau) || tau <= 0.0)
        throw ConfigError("tau must be positive");
    if (!finite(t_f) || t_f < 0.0)
        throw ConfigError("t_f must be non-negative");
}

SqueezeValue ramp_r(double t, const DriveRamp& ramp)
{
    if (t < 0.0)
        throw ConfigError("ramp evaluated at negative time");
    const double x = t / (2.0 * ramp.tau);
    const double th = std::tanh(x);
    // sech^2 = 1 - tanh^2 loses precision once tanh -> 1
    const double sech = 1.0 / std::cosh(x);
    return {ramp.r_max * th, ramp.r_max / (2.0 * ramp.tau) * sech * sech};
}

SqueezeValue squeeze_at(double t, const DriveSchedule& schedule)
{
    if (const auto* s = std::get_if<StaticDrive>(&schedule))
        return {s->r, 0.0};
    return ramp_r(t, std::get<DriveRamp>(schedule));
}

double r_from_lambda(double lambda, double delta_c)
{
    if (!(delta_c > 0.0))
        throw ConfigError("delta_c must be positive");
    if (!finite(lambda) || std::abs(lambda) >= delta_c) {
        std::ostringstream msg;
        msg << "parametric drive at or beyond the instability threshold: |lambda| = " << std::abs(lambda)
            << " >= delta_c = " << delta_c;
        throw InstabilityError(msg.str());
    }
    return 0.5 * std::atanh(lambda / delta_c);
}

double lambda_from_r(double r, double delta_c)
{
    return delta_c * std::tanh(2.0 * r);
}

double gain_db_from_r(double r)
{
    return 10.0 * std::log10(std::exp(2.0 * r));
}

double r_from_gain_db(double gain_db)
{
    return 0.5 * std::log(std::pow(10.0, gain_db / 10.0));
}

double effective_cavity_frequency(double r, double delta_c)
{
    return delta_c / std::cosh(2.0 * r);
}

double enhanced_coupling(double r, double g)
{
    return 0.5 * g * std::exp(r);
}

FrameSnapshot snapshot(double r, double r_dot, const ModelParams& params)
{
    if (!finite(r) || !finite(r_dot))
        throw ConfigError("squeeze parameter must be finite");
    FrameSnapshot s;
    s.r = r;
    s.r_dot = r_dot;
    s.lambda = lambda_from_r(r, params.delta_c);
    // tanh(2r) rounds to 1 for r > ~9.5; reject rather than report a
    // drive that sits exactly on the threshold.
    if (std::abs(s.lambda) >= params.delta_c)
        throw InstabilityError("squeeze parameter too large: lambda rounds to the instability threshold");
    s.omega_c_eff = effective_cavity_frequency(r, params.delta_c);
    s.g_tilde = enhanced_coupling(r, params.g);
    return s;
}

FrameSnapshot snapshot(double t, const ModelParams& params, const DriveSchedule& schedule)
{
    const SqueezeValue sq = squeeze_at(t, schedule);
    return snapshot(sq.r, sq.r_dot, params);
}

Operator hamiltonian_lab(const FrameSnapshot& snap, const ModelParams& params, const HilbertSpec& spec)
{
    const CompositeOperators ops(spec);
    const Operator a2 = ops.a * ops.a;
    const Operator ad2 = ops.a_dag * ops.a_dag;
    return params.delta_c * ops.n + (0.5 * params.delta_q) * ops.sigma_z - (0.5 * snap.lambda) * (ad2 + a2) +
           params.g * (ops.a_dag * ops.sigma_minus + ops.sigma_plus * ops.a);
}

SqueezedFrameBasis squeezed_frame_basis(const HilbertSpec& spec)
{
    const CompositeOperators ops(spec);
    return {ops.n,
            0.5 * ops.sigma_z,
            0.5 * ((ops.a_dag + ops.a) * (ops.sigma_plus + ops.sigma_minus)),
            -0.5 * ((ops.a_dag - ops.a) * (ops.sigma_plus - ops.sigma_minus)),
            (-0.5 * I) * (ops.a_dag * ops.a_dag - ops.a * ops.a)};
}

SqueezedFrameParts hamiltonian_squeezed_parts(const FrameSnapshot& snap, const ModelParams& params,
                                              const HilbertSpec& spec)
{
    const SqueezedFrameBasis b = squeezed_frame_basis(spec);
    Operator rabi = snap.omega_c_eff * b.n + params.delta_q * b.half_sz + (params.g * std::exp(snap.r)) * b.rabi_coupling;
    Operator err = (params.g * std::exp(-snap.r)) * b.err_coupling;
    Operator da = snap.r_dot == 0.0 ? Operator::zero(Space::composite(spec)) : snap.r_dot * b.da_generator;
    return {std::move(rabi), std::move(err), std::move(da)};
}

double squeezed_vacuum_tail(double r, int fock_cutoff)
{
    if (r == 0.0)
        return fock_cutoff > 2 ? 0.0 : 1.0;
    const double t2 = std::tanh(r) * std::tanh(r);
    // P(2m) = tanh^{2m} r (2m)! / (4^m (m!)^2) / cosh r
    const int k = fock_cutoff - 2;
    const double m0 = (k + k % 2) / 2;
    double log_p = m0 * std::log(t2) + std::lgamma(2.0 * m0 + 1.0) - 2.0 * m0 * std::log(2.0) -
                   2.0 * std::lgamma(m0 + 1.0) - std::log(std::cosh(r));
    double p = std::exp(log_p);
    double tail = 0.0;
    for (double m = m0; m < m0 + 1e7; m += 1.0) {
        tail += p;
        p *= t2 * (2.0 * m + 1.0) / (2.0 * m + 2.0);
        if (p < 1e-18 * tail || p == 0.0)
            break;
    }
    return tail;
}

Operator squeeze_unitary(double r, const HilbertSpec& spec, Warnings* warnings)
{
    if (!finite(r))
        throw ConfigError("squeeze_unitary: r must be finite");
    const int nf = spec.fock_cutoff();
    if (r == 0.0)
        return Operator::identity(Space::composite(spec));
    const double tail = squeezed_vacuum_tail(r, nf);
    if (tail >= squeeze_tail_limit) {
        std::ostringstream msg;
        msg << "squeezed vacuum at r=" << r << " leaves weight " << tail << " on the top Fock levels of N_F=" << nf;
        warn(warnings, "squeeze-cutoff", msg.str(), tail);
    }
    const Matrix a = annihilation(nf).matrix();
    const Matrix gen = 0.5 * r * (a * a - a.adjoint() * a.adjoint());
    const Operator u_cav(matrix_exponential(gen), Space::cavity(nf));
    return embed(u_cav, Factor::cavity, spec);
}

StateVector to_squeezed_frame(const StateVector& psi, double r, Warnings* warnings)
{
    return squeeze_unitary(r, psi.space().hilbert(), warnings) * psi;
}

DensityMatrix to_squeezed_frame(const DensityMatrix& rho, double r, Warnings* warnings)
{
    return conjugate(squeeze_unitary(r, rho.space().hilbert(), warnings), rho);
}

StateVector from_squeezed_frame(const StateVector& psi, double r, Warnings* warnings)
{
    return squeeze_unitary(-r, psi.space().hilbert(), warnings) * psi;
}

DensityMatrix from_squeezed_frame(const DensityMatrix& rho, double r, Warnings* warnings)
{
    return conjugate(squeeze_unitary(-r, rho.space().hilbert(), warnings), rho);
}

} // namespace synthcoupling
