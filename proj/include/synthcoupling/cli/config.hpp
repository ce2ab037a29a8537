#pragma once

// Experiment configuration: a flat key = value text format. Blank lines and
// everything after '#' are ignored; list values are comma-separated. See the
// README for the full key reference.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "synthcoupling/model.hpp"

namespace synthcoupling::cli {

enum class Experiment { spectrum, quench, adiabatic, sweep };
enum class Frame { squeezed, lab };

Experiment parse_experiment(const std::string& name);
std::string to_string(Experiment e);
Frame parse_frame(const std::string& name);
std::string to_string(Frame f);

struct CutoffPolicy {
    int initial = 12;
    double growth = 1.5;
    double threshold = 1e-4; // relative change between successive cutoffs
    int max_cutoff = 64;
    bool fixed = false; // single run at `initial`, no escalation

    void validate() const;
    int next(int cutoff) const;
};

struct SpectrumSettings {
    std::vector<double> gains_db{0.0, 20.0};
    bool resonant = true;   // delta_q = Omega_c[r] for every gain
    double window = 0.005;  // output half-width around delta_q
    double t_max = 1e5;
    double decay_ratio = 1e-6;
    int padding = 4;
};

struct QuenchSettings {
    std::vector<double> ratios{0.5, 1.0, 2.0}; // targets for g_tilde / Omega_c
    double window = 10.0;                      // Omega_c t range
    int points = 201;
};

struct AdiabaticSettings {
    double r_max = 1.25;
    double tau = 100.0;
    double t_f = 500.0;
    bool control_run = true; // also run with r_max = 0 for the reference Wigner grid
    double wigner_extent = 4.0;
    int wigner_points = 161;
};

struct SweepSettings {
    std::vector<double> gains_db{2.0, 5.0, 8.0, 10.86, 14.0, 20.0};
    std::vector<double> taus{25.0, 50.0, 100.0, 200.0};
    double t_f_factor = 5.0;
    int threads = 0;
    int ideal_max_cutoff = 2048;
};

struct ExperimentConfig {
    Experiment experiment = Experiment::adiabatic;
    ModelParams params;
    double dt_out = 1.0;
    double tolerance = 1e-9;
    Frame frame = Frame::squeezed;
    CutoffPolicy cutoff;

    SpectrumSettings spectrum;
    QuenchSettings quench;
    AdiabaticSettings adiabatic;
    SweepSettings sweep;

    /// Throws ConfigError naming the offending key.
    void validate() const;

    /// Resolved configuration as ordered key/value pairs, for the manifest.
    std::vector<std::pair<std::string, std::string>> describe() const;
};

/// Built-in defaults for each experiment (the values used when a key is absent).
ExperimentConfig default_config(Experiment experiment);

/// Parses config text. The `experiment` key selects the defaults; if it is
/// absent, `fallback` does. Unknown keys and malformed values throw
/// ConfigError with the line number.
ExperimentConfig parse_config(const std::string& text, std::optional<Experiment> fallback = std::nullopt);
ExperimentConfig load_config(const std::string& path, std::optional<Experiment> fallback = std::nullopt);

} // namespace synthcoupling::cli
