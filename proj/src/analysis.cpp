#include "synthcoupling/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

#include <Eigen/Eigenvalues>

#include "synthcoupling/integrator.hpp"

namespace synthcoupling {

double coherent_state_tail(double abs_alpha, int fock_cutoff)
{
    const int first = std::max(0, fock_cutoff - 2);
    const double mean = abs_alpha * abs_alpha;
    if (mean == 0.0)
        return first == 0 ? 1.0 : 0.0;
    double p = std::exp(first * std::log(mean) - mean - std::lgamma(first + 1.0));
    double tail = 0.0;
    for (int n = first; n < first + 10'000'000; ++n) {
        tail += p;
        p *= mean / (n + 1.0);
        if (n + 1 > mean && (p < 1e-18 * tail || p == 0.0))
            break;
    }
    return tail;
}

StateVector coherent_state(cplx alpha, int fock_cutoff)
{
    if (fock_cutoff < 2)
        throw ConfigError("coherent_state: fock cutoff must be at least 2");
    Vector amp(fock_cutoff);
    amp[0] = std::exp(-0.5 * std::norm(alpha));
    for (int n = 1; n < fock_cutoff; ++n)
        amp[n] = amp[n - 1] * alpha / std::sqrt(static_cast<double>(n));
    return StateVector(std::move(amp), Space::cavity(fock_cutoff));
}

StateVector cat_target(cplx alpha, const HilbertSpec& spec)
{
    const int nf = spec.fock_cutoff();
    const double tail = coherent_state_tail(std::abs(alpha), nf);
    if (tail >= squeeze_tail_limit) {
        std::ostringstream msg;
        msg << "cat state with |alpha|=" << std::abs(alpha) << " leaves weight " << tail
            << " on the top Fock levels of N_F=" << nf;
        throw CutoffError(msg.str());
    }
    const Vector plus = coherent_state(alpha, nf).amplitudes();
    const Vector minus = coherent_state(-alpha, nf).amplitudes();
    const double h = 1.0 / std::numbers::sqrt2;
    // |+x> = (|+z> + |-z>)/sqrt2, |-x> = (|+z> - |-z>)/sqrt2
    Vector amp(spec.dim());
    for (int n = 0; n < nf; ++n) {
        amp[spec.index(n, qubit_index::up)] = h * (h * plus[n] - h * minus[n]);
        amp[spec.index(n, qubit_index::down)] = h * (h * plus[n] + h * minus[n]);
    }
    amp.normalize();
    return StateVector(std::move(amp), Space::composite(spec));
}

cplx DisplacementTrajectory::alpha_at(double t) const
{
    if (times.empty() || t < times.front() || t > times.back())
        throw ConfigError("displacement trajectory does not cover the requested time");
    const auto it = std::lower_bound(times.begin(), times.end(), t);
    const auto j = static_cast<std::size_t>(it - times.begin());
    if (times[j] == t || j == 0)
        return alphas[j];
    const double w = (t - times[j - 1]) / (times[j] - times[j - 1]);
    return (1.0 - w) * alphas[j - 1] + w * alphas[j];
}

DisplacementTrajectory alpha_trajectory(const ModelParams& params, const DriveSchedule& schedule,
                                        std::span<const double> times, double rtol)
{
    params.validate();
    if (const auto* ramp = std::get_if<DriveRamp>(&schedule))
        ramp->validate();
    if (!times.empty() && times.front() < 0.0)
        throw ConfigError("alpha_trajectory: times must be non-negative");

    DisplacementTrajectory out;
    // y = (Lambda, J) with Lambda' = Omega_c, J' = exp(r + i Lambda)
    auto rhs = [&](double t, const Vector& y, Vector& dy) {
        const double r = squeeze_at(t, schedule).r;
        dy[0] = effective_cavity_frequency(r, params.delta_c);
        dy[1] = std::exp(cplx(r, y[0].real()));
    };
    auto record = [&](double t, const Vector& y) {
        const double lambda = y[0].real();
        out.times.push_back(t);
        out.lambda_c.push_back(lambda);
        out.alphas.push_back(params.g / (2.0 * I) * std::exp(cplx(0.0, -lambda)) * y[1]);
    };
    IntegratorOptions opt;
    opt.rtol = rtol;
    opt.atol = rtol * 1e-2;
    try {
        integrate_dopri5(rhs, 0.0, Vector::Zero(2), times, record, opt);
    } catch (const NumericalError& e) {
        throw NumericalError(std::string("displacement quadrature failed: ") + e.what());
    }
    return out;
}

double adiabatic_alpha(double r, const ModelParams& params)
{
    return -enhanced_coupling(r, params.g) / effective_cavity_frequency(r, params.delta_c);
}

Operator magnus_propagator(cplx alpha, double lambda_c, const HilbertSpec& spec)
{
    const int nf = spec.fock_cutoff();
    const double tail = coherent_state_tail(std::abs(alpha), nf);
    if (tail >= squeeze_tail_limit) {
        std::ostringstream msg;
        msg << "displacement |alpha|=" << std::abs(alpha) << " needs more than N_F=" << nf << " Fock levels (tail "
            << tail << ")";
        throw CutoffError(msg.str());
    }
    const CompositeOperators ops(spec);
    const Operator gen = (alpha * ops.a_dag - std::conj(alpha) * ops.a) * ops.sigma_x;
    Matrix phase = Matrix::Zero(spec.dim(), spec.dim());
    for (int n = 0; n < nf; ++n)
        for (int q = 0; q < HilbertSpec::qubit_dim; ++q)
            phase(spec.index(n, q), spec.index(n, q)) = std::exp(cplx(0.0, -lambda_c * n));
    return matrix_exponential(gen) * Operator(std::move(phase), Space::composite(spec));
}

Operator magnus_propagator(double t, const ModelParams& params, const DriveSchedule& schedule,
                           const HilbertSpec& spec)
{
    if (params.delta_q != 0.0)
        throw ConfigError("the closed-form Rabi propagator requires delta_q = 0");
    if (t == 0.0)
        return Operator::identity(Space::composite(spec));
    const double times[] = {0.0, t};
    const DisplacementTrajectory traj = alpha_trajectory(params, schedule, times);
    return magnus_propagator(traj.alphas.back(), traj.lambda_c.back(), spec);
}

double fidelity(const DensityMatrix& rho, const StateVector& target)
{
    require_same_space(rho.space(), target.space(), "fidelity");
    const Vector& psi = target.amplitudes();
    const double value = psi.dot(rho.matrix() * psi).real();
    return std::sqrt(std::clamp(value, 0.0, 1.0));
}

double overlap(const StateVector& a, const StateVector& b)
{
    return std::abs(inner(a, b));
}

double log_negativity(const DensityMatrix& rho)
{
    return std::log2(trace_norm(partial_transpose(rho, Factor::qubit)));
}

double log_negativity(const StateVector& psi)
{
    if (psi.space().kind() != Space::Kind::composite)
        throw DimensionError("log_negativity needs a composite state");
    const Vector& v = psi.amplitudes();
    double p_up = 0.0, p_down = 0.0;
    cplx coherence{0.0, 0.0};
    for (Eigen::Index n = 0; n < v.size() / 2; ++n) {
        const cplx u = v[2 * n + qubit_index::up];
        const cplx d = v[2 * n + qubit_index::down];
        p_up += std::norm(u);
        p_down += std::norm(d);
        coherence += u * std::conj(d);
    }
    const double total = p_up + p_down;
    const double det = std::max(0.0, (p_up * p_down - std::norm(coherence)) / (total * total));
    return std::log2(1.0 + 2.0 * std::sqrt(det));
}

double cat_log_negativity(double abs_alpha)
{
    const double s = std::exp(-2.0 * abs_alpha * abs_alpha);
    return std::log2(1.0 + std::sqrt(1.0 - s * s));
}

namespace {

std::vector<double> axis(double lo, double hi, int points)
{
    if (points < 2 || !(hi > lo))
        throw ConfigError("Wigner grid axes need at least two points and max > min");
    std::vector<double> out(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
        out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (points - 1);
    return out;
}

/// Laguerre recursion for the displaced-parity matrix elements, summed against rho.
cplx wigner_point(const Matrix& rho, cplx beta, std::vector<cplx>& w)
{
    const auto m_dim = static_cast<int>(rho.rows());
    const cplx a2 = 2.0 * beta;
    const cplx a2c = std::conj(a2);
    w[0] = std::exp(-2.0 * std::norm(beta)) / std::numbers::pi;
    cplx sum = rho(0, 0) * w[0];
    for (int n = 1; n < m_dim; ++n) {
        w[n] = a2 * w[n - 1] / std::sqrt(static_cast<double>(n));
        sum += rho(0, n) * w[n] + rho(n, 0) * std::conj(w[n]);
    }
    for (int m = 1; m < m_dim; ++m) {
        const double sm = std::sqrt(static_cast<double>(m));
        cplx temp = w[m];
        w[m] = (a2c * temp - sm * w[m - 1]) / sm;
        sum += rho(m, m) * w[m];
        for (int n = m + 1; n < m_dim; ++n) {
            const cplx next = (a2 * w[n - 1] - sm * temp) / std::sqrt(static_cast<double>(n));
            temp = w[n];
            w[n] = next;
            sum += rho(m, n) * w[n] + rho(n, m) * std::conj(w[n]);
        }
    }
    return 2.0 * sum;
}

} // namespace

WignerGrid wigner(const DensityMatrix& rho_cavity, const WignerGridSpec& spec)
{
    if (rho_cavity.space().kind() != Space::Kind::cavity)
        throw DimensionError("wigner expects a cavity-only density matrix; apply partial_trace first");
    WignerGrid out;
    out.re_axis = axis(spec.re_min, spec.re_max, spec.re_points);
    out.im_axis = axis(spec.im_min, spec.im_max, spec.im_points);
    const int rows = spec.im_points, cols = spec.re_points;
    out.values.resize(rows, cols);
    Eigen::MatrixXd imag(rows, cols);

    const Matrix& rho = rho_cavity.matrix();
    auto work = [&](int row_begin, int row_end) {
        std::vector<cplx> scratch(static_cast<std::size_t>(rho.rows()));
        for (int i = row_begin; i < row_end; ++i)
            for (int j = 0; j < cols; ++j) {
                const cplx v = wigner_point(rho, cplx(out.re_axis[j], out.im_axis[i]), scratch);
                out.values(i, j) = v.real();
                imag(i, j) = v.imag();
            }
    };
    int threads = spec.threads > 0 ? spec.threads : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::clamp(threads, 1, rows);
    if (threads == 1) {
        work(0, rows);
    } else {
        std::vector<std::jthread> pool;
        for (int k = 0; k < threads; ++k)
            pool.emplace_back(work, rows * k / threads, rows * (k + 1) / threads);
    }

    out.max_imag = imag.cwiseAbs().maxCoeff();
    const double dx = out.re_axis[1] - out.re_axis[0], dy = out.im_axis[1] - out.im_axis[0];
    double integral = 0.0;
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            const double wi = (i == 0 || i == rows - 1) ? 0.5 : 1.0;
            const double wj = (j == 0 || j == cols - 1) ? 0.5 : 1.0;
            integral += wi * wj * out.values(i, j);
        }
    out.integral = integral * dx * dy;
    if (std::abs(out.integral - 1.0) > 1e-2) {
        std::ostringstream msg;
        msg << "Wigner grid integrates to " << out.integral << "; the grid is too coarse or too small for this state";
        warn(&out.warnings, "wigner-normalization", msg.str(), out.integral);
    }
    return out;
}

std::vector<WignerPeak> wigner_maxima(const WignerGrid& grid, double min_relative)
{
    const auto rows = grid.values.rows(), cols = grid.values.cols();
    const double top = grid.values.maxCoeff();
    std::vector<WignerPeak> peaks;
    for (Eigen::Index i = 1; i + 1 < rows; ++i)
        for (Eigen::Index j = 1; j + 1 < cols; ++j) {
            const double v = grid.values(i, j);
            if (v < min_relative * top)
                continue;
            bool is_max = true;
            for (int di = -1; di <= 1 && is_max; ++di)
                for (int dj = -1; dj <= 1; ++dj) {
                    if (di == 0 && dj == 0)
                        continue;
                    const double u = grid.values(i + di, j + dj);
                    // strict on one side so flat tops report a single point
                    if (u > v || (u == v && (di < 0 || (di == 0 && dj < 0)))) {
                        is_max = false;
                        break;
                    }
                }
            if (is_max)
                peaks.push_back({cplx(grid.re_axis[static_cast<std::size_t>(j)], grid.im_axis[static_cast<std::size_t>(i)]), v});
        }
    return peaks;
}

ErrorNormEstimates error_norm_estimates(double t, const ModelParams& params, const DriveSchedule& schedule,
                                        const DisplacementTrajectory& trajectory)
{
    const FrameSnapshot snap = snapshot(t, params, schedule);
    const cplx alpha = trajectory.alpha_at(t);
    ErrorNormEstimates out;
    out.err_rabi = 0.5 * params.g * std::exp(-snap.r) * std::abs(alpha.imag());
    out.da_rabi = std::abs(snap.r_dot * alpha);
    out.err_negligible = std::abs(alpha.imag()) <= 0.1 * std::abs(alpha.real());
    out.adiabatic = std::abs(snap.r_dot) <= 0.1 * snap.omega_c_eff;
    return out;
}

StateVector ideal_rabi_ground_state(double r, const ModelParams& params, const HilbertSpec& spec)
{
    const FrameSnapshot snap = snapshot(r, 0.0, params);
    const int nf = spec.fock_cutoff();
    // The sector is the chain |0,-z>, |1,+z>, |2,-z>, ...: one qubit state per
    // Fock level, linked by g_tilde sqrt(n+1). H_Rabi is real tridiagonal there.
    auto qubit_of = [](int n) { return n % 2 == 0 ? qubit_index::down : qubit_index::up; };
    Eigen::VectorXd diag(nf);
    Eigen::VectorXd off(nf - 1);
    for (int n = 0; n < nf; ++n) {
        const double sz = qubit_of(n) == qubit_index::up ? 1.0 : -1.0;
        diag[n] = snap.omega_c_eff * n + 0.5 * params.delta_q * sz;
        if (n + 1 < nf)
            off[n] = snap.g_tilde * std::sqrt(static_cast<double>(n + 1));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success)
        throw NumericalError("ideal Rabi diagonalization failed");
    Eigen::VectorXd ground = es.eigenvectors().col(0);
    Eigen::Index big = 0;
    ground.cwiseAbs().maxCoeff(&big);
    if (ground[big] < 0.0)
        ground = -ground;
    Vector amp = Vector::Zero(spec.dim());
    for (int n = 0; n < nf; ++n)
        amp[spec.index(n, qubit_of(n))] = ground[n];
    return StateVector(std::move(amp), Space::composite(spec));
}

} // namespace synthcoupling
