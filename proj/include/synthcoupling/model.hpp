#pragma once

// Parametrically driven cavity coupled to a qubit. All frequencies and rates
// are in units of the cavity detuning delta_c, which is normally 1.

#include <variant>

#include "synthcoupling/operators.hpp"

namespace synthcoupling {

struct ModelParams {
    double delta_c = 1.0;
    double delta_q = 0.0;
    double g = 0.0;
    double kappa = 0.0;
    double gamma = 0.0;

    void validate() const;
};

/// r(t) = r_max tanh(t / 2 tau) on [0, t_f].
struct DriveRamp {
    double r_max = 0.0;
    double tau = 1.0;
    double t_f = 0.0;

    void validate() const;
};

/// Time-independent drive, used by the spectrum and quench experiments.
struct StaticDrive {
    double r = 0.0;
};

using DriveSchedule = std::variant<StaticDrive, DriveRamp>;

struct SqueezeValue {
    double r;
    double r_dot;
};

SqueezeValue ramp_r(double t, const DriveRamp& ramp);
SqueezeValue squeeze_at(double t, const DriveSchedule& schedule);

/// tanh 2r = lambda / delta_c. Throws InstabilityError for |lambda| >= delta_c.
double r_from_lambda(double lambda, double delta_c);
double lambda_from_r(double r, double delta_c);

/// Parametric gain e^{2r} expressed in dB, i.e. 10 log10(e^{2r}).
double gain_db_from_r(double r);
double r_from_gain_db(double gain_db);

struct FrameSnapshot {
    double r = 0.0;
    double r_dot = 0.0;
    double lambda = 0.0;
    double omega_c_eff = 0.0; // delta_c sech 2r
    double g_tilde = 0.0;     // g e^r / 2
};

FrameSnapshot snapshot(double r, double r_dot, const ModelParams& params);
FrameSnapshot snapshot(double t, const ModelParams& params, const DriveSchedule& schedule);

double effective_cavity_frequency(double r, double delta_c);
double enhanced_coupling(double r, double g);

/// delta_c a^dag a + (delta_q/2) sigma_z - (lambda/2)(a^dag^2 + a^2) + g (a^dag sigma_- + sigma_+ a)
Operator hamiltonian_lab(const FrameSnapshot& snap, const ModelParams& params, const HilbertSpec& spec);

struct SqueezedFrameParts {
    Operator rabi;
    Operator err;
    Operator da;

    Operator total() const { return rabi + err + da; }
};

SqueezedFrameParts hamiltonian_squeezed_parts(const FrameSnapshot& snap, const ModelParams& params,
                                              const HilbertSpec& spec);

/// Operator-valued building blocks of the squeezed-frame Hamiltonian, each
/// multiplied by a scalar coefficient in hamiltonian_squeezed_parts.
struct SqueezedFrameBasis {
    Operator n;             // a^dag a
    Operator half_sz;       // sigma_z / 2
    Operator rabi_coupling; // (a^dag + a)(sigma_+ + sigma_-) / 2
    Operator err_coupling;  // -(a^dag - a)(sigma_+ - sigma_-) / 2
    Operator da_generator;  // -(i/2)(a^dag^2 - a^2)
};

SqueezedFrameBasis squeezed_frame_basis(const HilbertSpec& spec);

/// Probability weight of U_S[r]|0> on the top two Fock levels, sum_{n >= N_F-2} |<n|U_S|0>|^2,
/// evaluated from the closed-form squeezed-vacuum distribution.
double squeezed_vacuum_tail(double r, int fock_cutoff);

inline constexpr double squeeze_tail_limit = 1e-8;

/// U_S[r] = exp[r (a^2 - a^dag^2) / 2] on the composite space. Emits a
/// "squeeze-cutoff" warning when the squeezed-vacuum tail exceeds 1e-8.
Operator squeeze_unitary(double r, const HilbertSpec& spec, Warnings* warnings = nullptr);

StateVector to_squeezed_frame(const StateVector& psi, double r, Warnings* warnings = nullptr);
DensityMatrix to_squeezed_frame(const DensityMatrix& rho, double r, Warnings* warnings = nullptr);
StateVector from_squeezed_frame(const StateVector& psi, double r, Warnings* warnings = nullptr);
DensityMatrix from_squeezed_frame(const DensityMatrix& rho, double r, Warnings* warnings = nullptr);

} // namespace synthcoupling
