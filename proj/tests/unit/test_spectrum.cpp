#include <doctest.h>

#include <cmath>
#include <numbers>

#include "synthcoupling/spectrum.hpp"

using namespace synthcoupling;

namespace {

ModelParams vrs_params()
{
    ModelParams p;
    p.g = 1e-4;
    p.kappa = 5e-4;
    p.gamma = 5e-4;
    return p;
}

SpectrumResult spectrum_around(ModelParams p, double r, int fock_cutoff, double half_width)
{
    SpectrumOptions opt;
    opt.omega_min = p.delta_q - half_width;
    opt.omega_max = p.delta_q + half_width;
    return absorption_spectrum(p, snapshot(r, 0.0, p), HilbertSpec(fock_cutoff), opt);
}

} // namespace

TEST_CASE("free qubit gives a Lorentzian of width gamma")
{
    ModelParams p = vrs_params();
    p.g = 0.0;
    p.delta_q = 1.0;
    const auto s = spectrum_around(p, 0.0, 2, 0.01);
    CHECK(s.warnings.empty());
    CHECK(s.achieved_decay <= 1e-6);
    const auto peaks = find_peaks(s);
    REQUIRE(peaks.size() == 1);
    CHECK(peaks[0].omega == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(peaks[0].fwhm - p.gamma) / p.gamma <= 0.02);

    // Shape: |S| against the normalized Lorentzian (gamma/2)^2 / ((w - dq)^2 + (gamma/2)^2).
    double worst = 0.0;
    for (std::size_t k = 0; k < s.omegas.size(); ++k) {
        const double x = s.omegas[k] - p.delta_q;
        if (std::abs(x) > 5 * p.gamma)
            continue;
        const double lorentz = 0.25 * p.gamma * p.gamma / (x * x + 0.25 * p.gamma * p.gamma);
        worst = std::max(worst, std::abs(std::abs(s.s_values[k]) - lorentz));
    }
    CHECK(worst <= 0.02);
}

TEST_CASE("spectrum values are real up to round-off")
{
    ModelParams p = vrs_params();
    p.delta_q = 1.0;
    const auto s = spectrum_around(p, 0.0, 4, 0.005);
    double imag = 0.0;
    for (const auto& v : s.s_values)
        imag = std::max(imag, std::abs(v.imag()));
    CHECK(imag <= 1e-10);
    CHECK(s.omegas.size() == s.s_values.size());
    for (std::size_t k = 1; k < s.omegas.size(); ++k)
        REQUIRE(s.omegas[k] > s.omegas[k - 1]);
}

TEST_CASE("undriven system shows one absorption line")
{
    ModelParams p = vrs_params();
    p.delta_q = 1.0;
    const auto peaks = find_peaks(spectrum_around(p, 0.0, 8, 0.005));
    REQUIRE(peaks.size() == 1);
    CHECK(std::abs(peaks[0].omega - 1.0) <= 1e-4);
}

TEST_CASE("20 dB drive splits the line by twice the enhanced coupling")
{
    ModelParams p = vrs_params();
    const double r = r_from_gain_db(20.0);
    p.delta_q = effective_cavity_frequency(r, 1.0);
    const auto s = spectrum_around(p, r, 8, 0.005);
    CHECK(s.method == "eigen");
    const auto peaks = find_peaks(s);
    REQUIRE(peaks.size() == 2);
    const double split = peaks[1].omega - peaks[0].omega;
    CHECK(std::abs(split - 2 * enhanced_coupling(r, p.g)) <= 0.2 * 2 * enhanced_coupling(r, p.g));
    CHECK(peaks[0].omega < p.delta_q);
    CHECK(peaks[1].omega > p.delta_q);
}

TEST_CASE("peak finder on synthetic data")
{
    SpectrumResult s;
    for (int k = 0; k <= 2000; ++k) {
        const double w = -1.0 + 1e-3 * k;
        s.omegas.push_back(w);
        const double a = 0.01 / ((w + 0.3) * (w + 0.3) + 0.01);
        const double b = 0.5 * 0.0025 / ((w - 0.4) * (w - 0.4) + 0.0025);
        s.s_values.push_back(a + b);
    }
    const auto peaks = find_peaks(s);
    REQUIRE(peaks.size() == 2);
    CHECK(peaks[0].omega == doctest::Approx(-0.3).epsilon(1e-3));
    CHECK(peaks[1].omega == doctest::Approx(0.4).epsilon(1e-3));
    CHECK(peaks[0].fwhm == doctest::Approx(0.2).epsilon(0.05));
    CHECK(peaks[1].fwhm == doctest::Approx(0.1).epsilon(0.05));
    CHECK(find_peaks(s, 0.6).size() == 1);
}

TEST_CASE("an undecayed correlation is reported")
{
    ModelParams p = vrs_params();
    p.delta_q = 1.0;
    SpectrumOptions opt;
    opt.t_max = 1000.0;
    opt.omega_min = 0.99;
    opt.omega_max = 1.01;
    const auto s = absorption_spectrum(p, snapshot(0.0, 0.0, p), HilbertSpec(2), opt);
    REQUIRE(!s.warnings.empty());
    CHECK(s.warnings[0].code == "correlation-decay");
    CHECK(s.achieved_decay > 1e-6);
}
