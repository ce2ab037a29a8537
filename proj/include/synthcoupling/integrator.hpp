#pragma once

// Dormand-Prince 5(4) embedded Runge-Kutta pair with step-size control and
// fourth-order continuous (dense) output, for complex state vectors.

#include <functional>
#include <limits>
#include <span>

#include "synthcoupling/operators.hpp"

namespace synthcoupling {

struct IntegratorOptions {
    double rtol = 1e-9;
    double atol = 1e-9;
    double initial_step = 0.0; // 0: choose automatically
    double max_step = std::numeric_limits<double>::infinity();
    long max_steps = 50'000'000;
};

struct IntegratorStats {
    long accepted = 0;
    long rejected = 0;
    long rhs_evaluations = 0;
    double last_step = 0.0;
};

using OdeRhs = std::function<void(double t, const Vector& y, Vector& dydt)>;
using OdeOutput = std::function<void(double t, const Vector& y)>;

/// Integrates dy/dt = f(t, y) from t0 and reports y at each of the
/// (ascending, >= t0) output times. Output times equal to t0 are reported
/// with the initial value. Throws NumericalError on step-size underflow,
/// non-finite states or when max_steps is exhausted.
IntegratorStats integrate_dopri5(const OdeRhs& rhs, double t0, Vector y0, std::span<const double> output_times,
                                 const OdeOutput& output, const IntegratorOptions& options = {});

} // namespace synthcoupling
