#pragma once

// Qubit absorption spectrum from the steady-state correlation
// C(t) = Tr[sigma_- e^{Lt}(sigma_+ rho_ss)] (quantum regression).

#include <limits>
#include <string>
#include <vector>

#include "synthcoupling/dynamics.hpp"

namespace synthcoupling {

struct SpectrumOptions {
    double t_max = 1e5;          // hard cap on the correlation window
    double decay_ratio = 1e-6;   // stop once |C(t) - C(inf)| <= ratio |C(0) - C(inf)|
    int padding = 4;             // zero-padding factor before the FFT
    double dt = 0.0;             // 0: pick from the fastest weighted mode
    double omega_min = -std::numeric_limits<double>::infinity();
    double omega_max = std::numeric_limits<double>::infinity();
    std::size_t max_samples = std::size_t{1} << 22;
};

struct SpectrumResult {
    std::vector<double> omegas;
    std::vector<cplx> s_values; // divided by `scale`, so max |S| = 1
    double scale = 1.0;
    double dt = 0.0;
    double t_window = 0.0;
    double achieved_decay = 0.0;
    cplx stationary_part{0.0, 0.0}; // |<sigma_+>|^2, removed before the transform
    std::string method;             // "eigen" or "propagator"
    Warnings warnings;

    static constexpr const char* normalization =
        "S(w) = int_{-inf}^{inf} C(t) e^{+i w t} dt with C(-t) = conj C(t) and the stationary part removed; "
        "values divided by max|S| over the full FFT grid";
};

/// Spectrum for a static squeezed-frame configuration: H_Rabi + H_Err at
/// snapshot r, jumps {(a, kappa), (sigma_-, gamma)}.
SpectrumResult absorption_spectrum(const ModelParams& params, const FrameSnapshot& snap, const HilbertSpec& spec,
                                   const SpectrumOptions& options = {});

/// Same procedure for an arbitrary static generator.
SpectrumResult absorption_spectrum(const LindbladSnapshot& generator, const SpectrumOptions& options = {});

struct SpectrumPeak {
    double omega = 0.0;
    double height = 0.0;
    double fwhm = 0.0; // NaN when a half-maximum crossing lies outside the grid
};

/// Local maxima of |S| above min_relative * max|S|, refined by parabolic
/// interpolation, sorted by frequency.
std::vector<SpectrumPeak> find_peaks(const SpectrumResult& spectrum, double min_relative = 0.05);

} // namespace synthcoupling
