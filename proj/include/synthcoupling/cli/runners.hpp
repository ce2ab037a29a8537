#pragma once

// Experiment runners. Each compute_* function is pure (no files); run_* wraps
// it, writes the CSV outputs into the output directory and fills the manifest.

#include <filesystem>
#include <limits>
#include <optional>
#include <map>
#include <string>
#include <vector>

#include "synthcoupling/analysis.hpp"
#include "synthcoupling/cli/config.hpp"
#include "synthcoupling/cli/cutoff.hpp"
#include "synthcoupling/cli/output.hpp"
#include "synthcoupling/spectrum.hpp"

namespace synthcoupling::cli {

inline constexpr const char* tool_version = "synthcoupling 1.0.0";

using Scalars = std::map<std::string, double>;

/// Largest population on the top two Fock levels (the cutoff tail).
double fock_tail(const StateVector& psi);
double fock_tail(const DensityMatrix& rho);

// --- spectrum ---------------------------------------------------------------

struct SpectrumCurve {
    double gain_db = 0.0;
    double r = 0.0;
    ModelParams params; // delta_q already resolved
    SpectrumResult spectrum;
    std::vector<SpectrumPeak> peaks;
    Scalars scalars;
    CutoffLadder ladder;
};

/// One drive setting at a fixed cutoff.
SpectrumCurve spectrum_curve(const ExperimentConfig& config, double gain_db, int fock_cutoff);
std::vector<SpectrumCurve> compute_spectrum(const ExperimentConfig& config);

// --- quench -----------------------------------------------------------------

/// Squeeze parameter with g e^r / 2 = ratio * delta_c sech 2r (bisection).
double r_for_coupling_ratio(double ratio, const ModelParams& params);

struct QuenchCurve {
    double target_ratio = 0.0;
    double r = 0.0;
    double omega_c = 0.0;
    std::vector<double> times;
    std::vector<double> overlaps;
    Scalars scalars; // avg_overlap, min_overlap, n_full_final, n_rabi_final
    CutoffLadder ladder;
};

/// Full squeezed-frame Hamiltonian (r_dot = 0) against H_Rabi alone, both from
/// |0,-z>, on Omega_c t in [0, window]. Throws CutoffError when either state
/// puts more than squeeze_tail_limit on the top two Fock levels.
QuenchCurve quench_curve(const ModelParams& params, double r, double window, int points, int fock_cutoff,
                         double tolerance = 1e-9);
std::vector<QuenchCurve> compute_quench(const ExperimentConfig& config);

// --- adiabatic preparation --------------------------------------------------

struct AdiabaticSeries {
    std::vector<double> t, fidelity, log_negativity, lambda, trace, purity;
    std::vector<cplx> alpha;
};

struct AdiabaticResult {
    DriveRamp ramp;
    AdiabaticSeries series;
    DensityMatrix final_state{Matrix::Zero(2, 2), Space::qubit()}; // squeezed frame
    cplx alpha_final{0.0, 0.0};
    Scalars scalars; // F_final, EN_final
};

struct AdiabaticOptions {
    bool keep_series = true;
    bool keep_final_state = true;
};

/// One ramp at a fixed cutoff. In the lab frame the state is mapped into the
/// squeezed frame before F and the final state are taken.
AdiabaticResult adiabatic_run(const ModelParams& params, const DriveRamp& ramp, Frame frame, double dt_out,
                              double tolerance, int fock_cutoff, const AdiabaticOptions& options = {});

struct AdiabaticExperiment {
    Converged<AdiabaticResult> main;
    std::optional<Converged<AdiabaticResult>> control; // r_max = 0
    WignerGrid wigner_final;
    std::optional<WignerGrid> wigner_control;
    std::vector<WignerPeak> maxima;
};

AdiabaticExperiment compute_adiabatic(const ExperimentConfig& config);

// --- sweep ------------------------------------------------------------------

struct SweepCell {
    double gain_db = 0.0;
    double tau = 0.0;
    double f_final = std::numeric_limits<double>::quiet_NaN();
    double en_final = std::numeric_limits<double>::quiet_NaN();
    CutoffLadder ladder;
    std::string failure;
};

struct IdealPoint {
    double gain_db = 0.0;
    double r = 0.0;
    double en_ideal = std::numeric_limits<double>::quiet_NaN();
    double en_cat = std::numeric_limits<double>::quiet_NaN();
    CutoffLadder ladder;
    std::string failure;
};

struct SweepResult {
    std::vector<SweepCell> cells; // gain-major, in config order
    std::vector<IdealPoint> ideal;
};

/// Ideal-Rabi ground-state negativity at r, escalating the cutoff up to
/// `max_cutoff` (the ground state must satisfy the tail criterion).
IdealPoint ideal_point(const ModelParams& params, double gain_db, const CutoffPolicy& policy, int max_cutoff);

/// Throws ConfigError on empty lists before any computation. Cells run on a
/// thread pool; results are stored by cell index, so the output does not
/// depend on scheduling.
SweepResult compute_sweep(const ExperimentConfig& config);

// --- files ------------------------------------------------------------------

struct RunOutcome {
    Manifest manifest;
    std::vector<std::string> files; // relative to the output directory
};

/// Runs the configured experiment, writes its CSV files and manifest.txt
/// (last, atomically) into `out_dir`.
RunOutcome run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir);

std::string wigner_csv(const WignerGrid& grid);

} // namespace synthcoupling::cli
