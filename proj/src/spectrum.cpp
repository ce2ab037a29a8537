#include "synthcoupling/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <unsupported/Eigen/FFT>

namespace synthcoupling {

namespace {

/// C(t) - C(inf) as a sum of decaying exponentials.
struct ModeExpansion {
    std::vector<cplx> weights;
    std::vector<cplx> rates;

    cplx at(double t) const
    {
        cplx sum = 0.0;
        for (std::size_t k = 0; k < weights.size(); ++k)
            sum += weights[k] * std::exp(rates[k] * t);
        return sum;
    }

    double envelope(double t) const
    {
        double sum = 0.0;
        for (std::size_t k = 0; k < weights.size(); ++k)
            sum += std::abs(weights[k]) * std::exp(rates[k].real() * t);
        return sum;
    }
};

std::size_t next_pow2(std::size_t n)
{
    std::size_t p = 1;
    while (p < n)
        p <<= 1;
    return p;
}

} // namespace

SpectrumResult absorption_spectrum(const ModelParams& params, const FrameSnapshot& snap, const HilbertSpec& spec,
                                   const SpectrumOptions& options)
{
    return absorption_spectrum(squeezed_vacuum_input_generator(params, snap.r, spec), options);
}

SpectrumResult absorption_spectrum(const LindbladSnapshot& generator, const SpectrumOptions& options)
{
    if (!(options.t_max > 0.0) || !(options.decay_ratio > 0.0) || options.padding < 1 || options.dt < 0.0)
        throw ConfigError("spectrum options: t_max, decay_ratio, padding must be positive");
    const Space space = generator.hamiltonian.space();
    if (space.kind() != Space::Kind::composite)
        throw DimensionError("absorption spectrum needs a composite cavity-qubit generator");
    const CompositeOperators ops(space.hilbert());
    const Eigen::Index d = space.dim();
    const Eigen::Index n = d * d;

    const Liouvillian liouvillian = build_liouvillian(generator);
    const Matrix& l = liouvillian.matrix;
    Eigen::ComplexEigenSolver<Matrix> es(l);
    if (es.info() != Eigen::Success)
        throw NumericalError("Liouvillian eigendecomposition failed");
    const Vector& lambdas = es.eigenvalues();

    Eigen::Index k0 = 0;
    lambdas.cwiseAbs().minCoeff(&k0);
    {
        double second = std::numeric_limits<double>::infinity();
        for (Eigen::Index k = 0; k < n; ++k)
            if (k != k0)
                second = std::min(second, std::abs(lambdas[k]));
        if (second <= 1e-8) {
            std::ostringstream msg;
            msg << "steady state is not unique: two Liouvillian eigenvalues below 1e-8 (" << std::abs(lambdas[k0])
                << ", " << second << ")";
            throw NumericalError(msg.str());
        }
    }
    SteadyStateOptions ss_opt;
    ss_opt.check_uniqueness = false;
    const DensityMatrix rho_ss = steady_state(liouvillian, ss_opt);

    const Vector chi0 = vectorize(DensityMatrix(ops.sigma_plus.matrix() * rho_ss.matrix(), space));
    const Matrix sm_t = ops.sigma_minus.matrix().transpose();
    const Vector s = Eigen::Map<const Vector>(sm_t.data(), n); // Tr[sigma_- X] = s . vec(X)

    const Matrix& v = es.eigenvectors();
    const Eigen::PartialPivLU<Matrix> lu(v);
    const Vector w = lu.solve(chi0);
    const double recon = (v * w - chi0).cwiseAbs().maxCoeff();
    const Vector b = v.transpose() * s;

    SpectrumResult out;
    out.stationary_part = b[k0] * w[k0];
    ModeExpansion modes;
    double total = 0.0;
    for (Eigen::Index k = 0; k < n; ++k)
        total += std::abs(b[k] * w[k]);
    for (Eigen::Index k = 0; k < n; ++k) {
        const cplx c = b[k] * w[k];
        if (k != k0 && std::abs(c) > 1e-14 * total) {
            modes.weights.push_back(c);
            modes.rates.push_back(lambdas[k]);
        }
    }
    const cplx c0 = s.cwiseProduct(chi0).sum() - out.stationary_part; // s^T chi0
    const double c0_abs = std::abs(c0);
    if (!(c0_abs > 0.0))
        throw NumericalError("correlation function vanishes identically; no absorption");

    // Window: until the envelope of |C(t) - C(inf)| falls below the ratio.
    const double target = options.decay_ratio * c0_abs;
    double t_window = options.t_max;
    if (modes.envelope(options.t_max) <= target) {
        double lo = 0.0, hi = options.t_max;
        for (int it = 0; it < 200 && hi - lo > 1e-9 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (modes.envelope(mid) <= target ? hi : lo) = mid;
        }
        t_window = hi;
    }
    out.achieved_decay = modes.envelope(t_window) / c0_abs;
    if (out.achieved_decay > options.decay_ratio) {
        std::ostringstream msg;
        msg << "correlation decayed only to " << out.achieved_decay << " of its initial value by t_max=" << options.t_max;
        warn(&out.warnings, "correlation-decay", msg.str(), out.achieved_decay);
    }

    double dt = options.dt;
    if (dt == 0.0) {
        double omega_need = 0.0;
        for (const cplx& rate : modes.rates)
            omega_need = std::max(omega_need, std::abs(rate.imag()));
        for (double edge : {options.omega_min, options.omega_max})
            if (std::isfinite(edge))
                omega_need = std::max(omega_need, std::abs(edge));
        if (!(omega_need > 0.0))
            omega_need = 1.0;
        dt = std::numbers::pi / (2.0 * omega_need);
    }
    const auto samples = static_cast<std::size_t>(std::floor(t_window / dt)) + 1;
    if (samples > options.max_samples) {
        std::ostringstream msg;
        msg << "spectrum needs " << samples << " correlation samples (dt=" << dt << ", window=" << t_window
            << "), above the limit " << options.max_samples;
        throw NumericalError(msg.str());
    }
    out.dt = dt;
    out.t_window = t_window;

    // Check the expansion against direct propagation at a few checkpoints.
    constexpr int checkpoints = 32;
    const double step = t_window / checkpoints;
    const Matrix p_check = matrix_exponential(Matrix(l * step));
    double expansion_err = 0.0;
    {
        Vector chi = chi0;
        for (int j = 1; j <= checkpoints; ++j) {
            chi = p_check * chi;
            const cplx direct = s.cwiseProduct(chi).sum() - out.stationary_part;
            expansion_err = std::max(expansion_err, std::abs(direct - modes.at(j * step)));
        }
    }
    const bool expansion_ok = recon <= 1e-10 * std::max(1.0, chi0.cwiseAbs().maxCoeff()) &&
                              expansion_err <= 1e-7 * c0_abs;

    std::vector<cplx> corr(samples);
    if (expansion_ok) {
        out.method = "eigen";
        std::vector<cplx> phase(modes.weights.size()), factor(modes.weights.size());
        for (std::size_t k = 0; k < modes.weights.size(); ++k)
            factor[k] = std::exp(modes.rates[k] * dt);
        for (std::size_t m = 0; m < samples; ++m) {
            if (m % 1024 == 0)
                for (std::size_t k = 0; k < modes.weights.size(); ++k)
                    phase[k] = modes.weights[k] * std::exp(modes.rates[k] * (static_cast<double>(m) * dt));
            cplx sum = 0.0;
            for (std::size_t k = 0; k < phase.size(); ++k) {
                sum += phase[k];
                phase[k] *= factor[k];
            }
            corr[m] = sum;
        }
    } else {
        out.method = "propagator";
        std::ostringstream msg;
        msg << "eigen-expansion rejected (reconstruction " << recon << ", checkpoint error " << expansion_err
            << "); sampled by direct propagation";
        warn(&out.warnings, "spectrum-fallback", msg.str(), expansion_err);
        const Matrix p = matrix_exponential(Matrix(l * dt));
        Vector chi = chi0;
        for (std::size_t m = 0; m < samples; ++m) {
            corr[m] = s.cwiseProduct(chi).sum() - out.stationary_part;
            chi = p * chi;
        }
    }

    // One-sided transform F(w) = dt sum_k C_k e^{i w k dt} (trapezoid end weight),
    // then S = F + conj(F) from C(-t) = conj C(t).
    const std::size_t nfft = next_pow2(samples * static_cast<std::size_t>(options.padding));
    std::vector<cplx> in(nfft, cplx(0.0)), spec_raw;
    for (std::size_t m = 0; m < samples; ++m)
        in[m] = corr[m];
    in[0] *= 0.5;
    Eigen::FFT<double> fft;
    fft.SetFlag(Eigen::FFT<double>::Unscaled);
    fft.inv(spec_raw, in);

    const double domega = 2.0 * std::numbers::pi / (static_cast<double>(nfft) * dt);
    double peak = 0.0;
    std::vector<double> omegas(nfft);
    std::vector<cplx> values(nfft);
    for (std::size_t j = 0; j < nfft; ++j) {
        // ascending frequency: negative half first
        const std::size_t m = (j + nfft / 2) % nfft;
        const double omega = (static_cast<double>(m) - (m >= nfft / 2 ? static_cast<double>(nfft) : 0.0)) * domega;
        const cplx f = dt * spec_raw[m];
        omegas[j] = omega;
        values[j] = cplx(2.0 * f.real(), 0.0);
        peak = std::max(peak, std::abs(values[j]));
    }
    if (!(peak > 0.0) || !std::isfinite(peak))
        throw NumericalError("spectrum is zero or non-finite");
    out.scale = peak;
    for (std::size_t j = 0; j < nfft; ++j) {
        if (omegas[j] < options.omega_min || omegas[j] > options.omega_max)
            continue;
        out.omegas.push_back(omegas[j]);
        out.s_values.push_back(values[j] / peak);
    }
    return out;
}

std::vector<SpectrumPeak> find_peaks(const SpectrumResult& spectrum, double min_relative)
{
    const std::size_t n = spectrum.s_values.size();
    std::vector<double> mag(n);
    double top = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mag[i] = std::abs(spectrum.s_values[i]);
        top = std::max(top, mag[i]);
    }
    std::vector<SpectrumPeak> peaks;
    if (n < 3)
        return peaks;
    const auto& w = spectrum.omegas;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!(mag[i] > mag[i - 1] && mag[i] >= mag[i + 1]) || mag[i] < min_relative * top)
            continue;
        SpectrumPeak p;
        const double denom = mag[i - 1] - 2.0 * mag[i] + mag[i + 1];
        const double shift = denom != 0.0 ? 0.5 * (mag[i - 1] - mag[i + 1]) / denom : 0.0;
        p.omega = w[i] + shift * (w[i + 1] - w[i]);
        p.height = mag[i] - 0.25 * (mag[i - 1] - mag[i + 1]) * shift;
        const double half = 0.5 * mag[i];
        double left = std::numeric_limits<double>::quiet_NaN(), right = left;
        for (std::size_t j = i; j > 0; --j)
            if (mag[j - 1] < half) {
                left = w[j - 1] + (half - mag[j - 1]) / (mag[j] - mag[j - 1]) * (w[j] - w[j - 1]);
                break;
            }
        for (std::size_t j = i; j + 1 < n; ++j)
            if (mag[j + 1] < half) {
                right = w[j] + (mag[j] - half) / (mag[j] - mag[j + 1]) * (w[j + 1] - w[j]);
                break;
            }
        p.fwhm = right - left;
        peaks.push_back(p);
    }
    return peaks;
}

} // namespace synthcoupling
