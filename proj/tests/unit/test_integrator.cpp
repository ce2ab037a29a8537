#include <doctest.h>

#include <cmath>
#include <vector>

#include "synthcoupling/integrator.hpp"

using namespace synthcoupling;

TEST_CASE("exponential decay and rotation")
{
    const OdeRhs rhs = [](double, const Vector& y, Vector& dy) {
        dy.resize(2);
        dy[0] = -0.5 * y[0];
        dy[1] = cplx(0.0, -2.0) * y[1];
    };
    Vector y0(2);
    y0 << 1.0, 1.0;
    std::vector<double> times;
    for (int k = 0; k <= 40; ++k)
        times.push_back(0.25 * k);
    std::vector<Vector> out;
    IntegratorOptions opt;
    opt.rtol = 1e-11;
    opt.atol = 1e-13;
    const auto stats = integrate_dopri5(rhs, 0.0, y0, times, [&](double, const Vector& y) { out.push_back(y); }, opt);
    REQUIRE(out.size() == times.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
        REQUIRE(std::abs(out[k][0] - std::exp(-0.5 * times[k])) < 1e-9);
        REQUIRE(std::abs(out[k][1] - std::exp(cplx(0.0, -2.0 * times[k]))) < 1e-9);
    }
    CHECK(stats.accepted > 0);
    CHECK(stats.rhs_evaluations >= 6 * stats.accepted);
}

TEST_CASE("time-dependent right-hand side")
{
    // y' = cos(t) y, y = exp(sin t).
    const OdeRhs rhs = [](double t, const Vector& y, Vector& dy) { dy = std::cos(t) * y; };
    Vector y0 = Vector::Ones(1);
    const double times[] = {0.0, 1.0, 3.0, 7.5};
    std::vector<cplx> out;
    integrate_dopri5(rhs, 0.0, y0, times, [&](double, const Vector& y) { out.push_back(y[0]); });
    for (std::size_t k = 0; k < 4; ++k)
        CHECK(std::abs(out[k] - std::exp(std::sin(times[k]))) < 1e-7);
}

TEST_CASE("tighter tolerance converges")
{
    const OdeRhs rhs = [](double t, const Vector& y, Vector& dy) {
        dy.resize(2);
        dy[0] = y[1];
        dy[1] = -(1.0 + 0.5 * std::sin(t)) * y[0];
    };
    Vector y0(2);
    y0 << 1.0, 0.0;
    const double times[] = {20.0};
    auto solve = [&](double tol) {
        Vector last;
        IntegratorOptions opt;
        opt.rtol = tol;
        opt.atol = tol;
        integrate_dopri5(rhs, 0.0, y0, times, [&](double, const Vector& y) { last = y; }, opt);
        return last;
    };
    const Vector ref = solve(1e-13);
    const double e1 = (solve(1e-6) - ref).norm();
    const double e2 = (solve(1e-8) - ref).norm();
    CHECK(e2 < e1);
    CHECK(e2 < 1e-6);
}

TEST_CASE("failures are reported")
{
    const OdeRhs blowup = [](double, const Vector& y, Vector& dy) { dy = y.cwiseProduct(y); };
    Vector y0 = Vector::Ones(1);
    const double times[] = {2.0};
    CHECK_THROWS_AS(integrate_dopri5(blowup, 0.0, y0, times, [](double, const Vector&) {}), NumericalError);

    const OdeRhs slow = [](double, const Vector& y, Vector& dy) { dy = -y; };
    IntegratorOptions opt;
    opt.max_steps = 3;
    opt.max_step = 1e-3;
    CHECK_THROWS_AS(integrate_dopri5(slow, 0.0, y0, times, [](double, const Vector&) {}, opt), NumericalError);
}
