#pragma once

#include <span>
#include <vector>

#include "synthcoupling/model.hpp"
#include "synthcoupling/operators.hpp"

namespace synthcoupling {

/// Poisson weight of a coherent state |alpha> on Fock levels n >= fock_cutoff - 2.
double coherent_state_tail(double abs_alpha, int fock_cutoff);

/// Truncated coherent-state amplitudes e^{-|a|^2/2} a^n / sqrt(n!) on the cavity factor.
StateVector coherent_state(cplx alpha, int fock_cutoff);

/// (|alpha>|+x> - |-alpha>|-x>) / sqrt(2), renormalized on the truncated space.
/// Throws CutoffError when the coherent tail exceeds squeeze_tail_limit.
StateVector cat_target(cplx alpha, const HilbertSpec& spec);

/// Cavity displacement in the squeezed frame,
///   alpha(t) = (g / 2i) exp(-i Lambda(t)) int_0^t exp(r(t') + i Lambda(t')) dt',
///   Lambda(t) = int_0^t Omega_c(t') dt'.
struct DisplacementTrajectory {
    std::vector<double> times;
    std::vector<cplx> alphas;
    std::vector<double> lambda_c;

    /// Linear interpolation; throws ConfigError outside [times.front(), times.back()].
    cplx alpha_at(double t) const;
};

DisplacementTrajectory alpha_trajectory(const ModelParams& params, const DriveSchedule& schedule,
                                        std::span<const double> times, double rtol = 1e-12);

/// Ground-state displacement of the sigma_x = +1 branch, -g e^r / (2 Omega_c).
double adiabatic_alpha(double r, const ModelParams& params);

/// exp[(alpha a^dag - alpha^* a) sigma_x] exp(-i Lambda a^dag a).
Operator magnus_propagator(cplx alpha, double lambda_c, const HilbertSpec& spec);

/// Propagator of H_Rabi(t) from 0 to t, exact up to a global phase. Requires delta_q = 0.
Operator magnus_propagator(double t, const ModelParams& params, const DriveSchedule& schedule,
                           const HilbertSpec& spec);

/// sqrt(<psi|rho|psi>).
double fidelity(const DensityMatrix& rho, const StateVector& target);

/// |<a|b>|, insensitive to global phases.
double overlap(const StateVector& a, const StateVector& b);

/// log2 of the trace norm of the qubit partial transpose.
double log_negativity(const DensityMatrix& rho);

/// Same measure for a pure composite state, from the qubit reduced state:
/// log2(1 + 2 sqrt(det rho_qubit)). Cheap for large cutoffs.
double log_negativity(const StateVector& psi);

/// Closed form for the cat state at displacement |alpha|: log2(1 + sqrt(1 - e^{-4|alpha|^2})).
double cat_log_negativity(double abs_alpha);

struct WignerGridSpec {
    double re_min = -4.0;
    double re_max = 4.0;
    int re_points = 161;
    double im_min = -4.0;
    double im_max = 4.0;
    int im_points = 161;
    int threads = 0; // 0: hardware concurrency
};

struct WignerGrid {
    std::vector<double> re_axis;
    std::vector<double> im_axis;
    Eigen::MatrixXd values; // values(i, j) at beta = re_axis[j] + i im_axis[i]
    double integral = 0.0;  // trapezoidal estimate of int W d^2 beta
    double max_imag = 0.0;  // largest discarded imaginary part
    Warnings warnings;

    static constexpr const char* convention =
        "W(beta) = (2/pi) Tr[rho D(beta) P D(beta)^dag], P = (-1)^{a^dag a}, int W d^2beta = 1";
};

/// Wigner function of a cavity state (use partial_trace first for composite states).
WignerGrid wigner(const DensityMatrix& rho_cavity, const WignerGridSpec& grid = {});

struct WignerPeak {
    cplx beta;
    double value = 0.0;
};

/// Grid-point local maxima (8-neighbourhood) with value >= min_relative * max W.
std::vector<WignerPeak> wigner_maxima(const WignerGrid& grid, double min_relative = 0.5);

struct ErrorNormEstimates {
    double err_rabi = 0.0;      // (g/2) e^{-r} |Im alpha|
    double da_rabi = 0.0;       // |r_dot alpha|
    bool err_negligible = true; // |Im alpha| <= 0.1 |Re alpha|
    bool adiabatic = true;      // |r_dot| <= 0.1 Omega_c
};

ErrorNormEstimates error_norm_estimates(double t, const ModelParams& params, const DriveSchedule& schedule,
                                        const DisplacementTrajectory& trajectory);

/// Ground state of H_Rabi at squeeze r (no r_dot, no H_Err) inside the parity
/// sector -sigma_z (-1)^n = +1 that contains |0,-z>. The two sectors are
/// degenerate at delta_q = 0, where this picks the adiabatically connected one.
StateVector ideal_rabi_ground_state(double r, const ModelParams& params, const HilbertSpec& spec);

} // namespace synthcoupling
