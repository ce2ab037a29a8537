#include "synthcoupling/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace synthcoupling {

namespace {

// Butcher tableau of the Dormand-Prince pair.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;

constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;

// Difference between the fifth- and fourth-order weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

// Dense output: y(t + theta h) = y + h sum_j k_j sum_m P[j][m] theta^{m+1}
constexpr double P[7][4] = {
    {1.0, -8048581381.0 / 2820520608, 8663915743.0 / 2820520608, -12715105075.0 / 11282082432},
    {0.0, 0.0, 0.0, 0.0},
    {0.0, 131558114200.0 / 32700410799, -68118460800.0 / 10900136933, 87487479700.0 / 32700410799},
    {0.0, -1754552775.0 / 470086768, 14199869525.0 / 1410260304, -10690763975.0 / 1880347072},
    {0.0, 127303824393.0 / 49829197408, -318862633887.0 / 49829197408, 701980252875.0 / 199316789632},
    {0.0, -282668133.0 / 205662961, 2019193451.0 / 616988883, -1453857185.0 / 822651844},
    {0.0, 40617522.0 / 29380423, -110615467.0 / 29380423, 69997945.0 / 29380423},
};

double weighted_rms(const Vector& v, const Vector& y0, const Vector& y1, double rtol, double atol)
{
    double acc = 0.0;
    const Eigen::Index n = v.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        const double sc = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        const double r = std::abs(v[i]) / sc;
        acc += r * r;
    }
    return std::sqrt(acc / static_cast<double>(std::max<Eigen::Index>(n, 1)));
}

double initial_step(const OdeRhs& rhs, double t0, const Vector& y0, const Vector& f0, const IntegratorOptions& opt,
                    IntegratorStats& stats)
{
    // Hairer, Norsett & Wanner, "Solving ODEs I", II.4
    const double d0 = weighted_rms(y0, y0, y0, opt.rtol, opt.atol);
    const double d1 = weighted_rms(f0, y0, y0, opt.rtol, opt.atol);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, opt.max_step);
    const Vector y1 = y0 + h0 * f0;
    Vector f1(y0.size());
    rhs(t0 + h0, y1, f1);
    ++stats.rhs_evaluations;
    const double d2 = weighted_rms(f1 - f0, y0, y0, opt.rtol, opt.atol) / h0;
    const double dm = std::max(d1, d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 1.0 / 5.0);
    return std::min({100.0 * h0, h1, opt.max_step});
}

} // namespace

IntegratorStats integrate_dopri5(const OdeRhs& rhs, double t0, Vector y0, std::span<const double> output_times,
                                 const OdeOutput& output, const IntegratorOptions& opt)
{
    IntegratorStats stats;
    if (!(opt.rtol > 0.0) || !(opt.atol > 0.0))
        throw ConfigError("integrator tolerances must be positive");
    for (std::size_t i = 0; i < output_times.size(); ++i) {
        if (output_times[i] < t0 || (i > 0 && output_times[i] < output_times[i - 1]))
            throw ConfigError("output times must be ascending and not precede t0");
    }

    std::size_t next_out = 0;
    while (next_out < output_times.size() && output_times[next_out] == t0)
        output(output_times[next_out++], y0);
    if (next_out == output_times.size())
        return stats;
    const double t_end = output_times.back();

    const Eigen::Index n = y0.size();
    Vector k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), err(n), dense(n);

    double t = t0;
    Vector y = std::move(y0);
    rhs(t, y, k1);
    ++stats.rhs_evaluations;

    double h = opt.initial_step > 0.0 ? opt.initial_step : initial_step(rhs, t, y, k1, opt, stats);
    double err_old = 1e-4;
    bool last_rejected = false;

    constexpr double safety = 0.9, fac_min = 0.2, fac_max = 10.0;
    constexpr double beta = 0.04, alpha = 0.2 - beta * 0.75;

    while (t < t_end) {
        if (stats.accepted + stats.rejected >= opt.max_steps)
            throw NumericalError("integrator: maximum number of steps exhausted at t=" + std::to_string(t));
        h = std::min(h, opt.max_step);
        const bool final_step = t + h >= t_end;
        if (final_step)
            h = t_end - t;
        if (h <= 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
            std::ostringstream msg;
            msg << "integrator: step-size underflow at t=" << t << " (h=" << h << ", rtol=" << opt.rtol
                << ", accepted=" << stats.accepted << ", rejected=" << stats.rejected << ")";
            throw NumericalError(msg.str());
        }

        ytmp = y + h * (a21 * k1);
        rhs(t + c2 * h, ytmp, k2);
        ytmp = y + h * (a31 * k1 + a32 * k2);
        rhs(t + c3 * h, ytmp, k3);
        ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
        rhs(t + c4 * h, ytmp, k4);
        ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        rhs(t + c5 * h, ytmp, k5);
        ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        rhs(t + h, ytmp, k6);
        ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        rhs(t + h, ynew, k7);
        stats.rhs_evaluations += 6;

        err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const double err_norm = weighted_rms(err, y, ynew, opt.rtol, opt.atol);
        if (!std::isfinite(err_norm))
            throw NumericalError("integrator: non-finite state at t=" + std::to_string(t));

        if (err_norm <= 1.0) {
            const double t_new = final_step ? t_end : t + h;
            while (next_out < output_times.size() && output_times[next_out] <= t_new) {
                const double theta = (output_times[next_out] - t) / h;
                if (theta >= 1.0) {
                    output(output_times[next_out], ynew);
                } else {
                    double pw[4];
                    pw[0] = theta;
                    for (int m = 1; m < 4; ++m)
                        pw[m] = pw[m - 1] * theta;
                    auto q = [&](int j) { return P[j][0] * pw[0] + P[j][1] * pw[1] + P[j][2] * pw[2] + P[j][3] * pw[3]; };
                    dense = y + h * (q(0) * k1 + q(2) * k3 + q(3) * k4 + q(4) * k5 + q(5) * k6 + q(6) * k7);
                    output(output_times[next_out], dense);
                }
                ++next_out;
            }
            ++stats.accepted;
            stats.last_step = h;
            t = t_new;
            y.swap(ynew);
            k1.swap(k7);

            const double e = std::max(err_norm, 1e-10);
            double fac = safety * std::pow(e, -alpha) * std::pow(err_old, beta);
            fac = std::clamp(fac, fac_min, fac_max);
            if (last_rejected)
                fac = std::min(fac, 1.0);
            err_old = e;
            h *= fac;
            last_rejected = false;
        } else {
            ++stats.rejected;
            h *= std::max(fac_min, safety * std::pow(err_norm, -0.2));
            last_rejected = true;
        }
    }
    return stats;
}

} // namespace synthcoupling
