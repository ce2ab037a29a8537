#include "synthcoupling/cli/runners.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <mutex>
#include <thread>

namespace synthcoupling::cli {

double fock_tail(const StateVector& psi)
{
    const Vector& v = psi.amplitudes();
    const auto d = v.size();
    double tail = 0.0;
    for (Eigen::Index i = std::max<Eigen::Index>(0, d - 2 * HilbertSpec::qubit_dim); i < d; ++i)
        tail += std::norm(v[i]);
    return tail;
}

double fock_tail(const DensityMatrix& rho)
{
    const Matrix& m = rho.matrix();
    const auto d = m.rows();
    double tail = 0.0;
    for (Eigen::Index i = std::max<Eigen::Index>(0, d - 2 * HilbertSpec::qubit_dim); i < d; ++i)
        tail += m(i, i).real();
    return tail;
}

namespace {

std::string key_number(double v)
{
    return format_double(v);
}

} // namespace

// --- spectrum ---------------------------------------------------------------

SpectrumCurve spectrum_curve(const ExperimentConfig& config, double gain_db, int fock_cutoff)
{
    SpectrumCurve c;
    c.gain_db = gain_db;
    c.r = r_from_gain_db(gain_db);
    c.params = config.params;
    if (config.spectrum.resonant)
        c.params.delta_q = effective_cavity_frequency(c.r, c.params.delta_c);
    const FrameSnapshot snap = snapshot(c.r, 0.0, c.params);

    SpectrumOptions opt;
    opt.t_max = config.spectrum.t_max;
    opt.decay_ratio = config.spectrum.decay_ratio;
    opt.padding = config.spectrum.padding;
    opt.omega_min = c.params.delta_q - config.spectrum.window;
    opt.omega_max = c.params.delta_q + config.spectrum.window;
    c.spectrum = absorption_spectrum(c.params, snap, HilbertSpec(fock_cutoff), opt);
    c.peaks = find_peaks(c.spectrum);

    c.scalars["n_peaks"] = static_cast<double>(c.peaks.size());
    for (std::size_t i = 0; i < c.peaks.size(); ++i) {
        c.scalars["peak" + std::to_string(i) + ".omega"] = c.peaks[i].omega;
        c.scalars["peak" + std::to_string(i) + ".height"] = c.peaks[i].height;
    }
    return c;
}

std::vector<SpectrumCurve> compute_spectrum(const ExperimentConfig& config)
{
    config.validate();
    std::vector<SpectrumCurve> out;
    for (double gdb : config.spectrum.gains_db) {
        auto conv = adaptive_cutoff([&](int n) { return spectrum_curve(config, gdb, n); }, config.cutoff);
        conv.result.ladder = std::move(conv.ladder);
        out.push_back(std::move(conv.result));
    }
    return out;
}

// --- quench -----------------------------------------------------------------

double r_for_coupling_ratio(double ratio, const ModelParams& params)
{
    auto ratio_at = [&](double r) {
        return enhanced_coupling(r, params.g) / effective_cavity_frequency(r, params.delta_c);
    };
    if (!(ratio > 0.0))
        throw ConfigError("coupling ratio targets must be positive");
    if (ratio < ratio_at(0.0))
        throw ConfigError("coupling ratio " + format_double(ratio) + " is below g / (2 delta_c) and cannot be reached");
    double lo = 0.0, hi = 0.5;
    while (ratio_at(hi) < ratio) {
        lo = hi;
        hi *= 2.0;
        if (hi > 8.0)
            throw ConfigError("coupling ratio " + format_double(ratio) + " needs an unphysically large squeeze");
    }
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        (ratio_at(mid) < ratio ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

QuenchCurve quench_curve(const ModelParams& params, double r, double window, int points, int fock_cutoff,
                         double tolerance)
{
    const HilbertSpec hs(fock_cutoff);
    const StaticDrive drive{r};
    const auto h_full = squeezed_frame_hamiltonian(params, drive, hs);
    const auto h_rabi = squeezed_frame_hamiltonian(params, drive, hs, {.err = false, .da = false});

    QuenchCurve c;
    c.r = r;
    c.omega_c = effective_cavity_frequency(r, params.delta_c);
    const double t_end = window / c.omega_c;
    const TimeGrid grid{0.0, t_end, t_end / (points - 1), tolerance};
    const auto psi0 = StateVector::basis(hs, 0, qubit_index::down);
    const auto full = evolve_schrodinger(h_full, psi0, grid);
    const auto rabi = evolve_schrodinger(h_rabi, psi0, grid);

    double tail = 0.0, sum = 0.0, worst = 1.0;
    for (std::size_t k = 0; k < full.times.size(); ++k) {
        tail = std::max({tail, fock_tail(full.states[k]), fock_tail(rabi.states[k])});
        const double ov = overlap(rabi.states[k], full.states[k]);
        c.times.push_back(full.times[k]);
        c.overlaps.push_back(ov);
        sum += ov;
        worst = std::min(worst, ov);
    }
    if (tail >= squeeze_tail_limit)
        throw CutoffError("quench state reaches the top Fock levels (tail " + format_double(tail) + " at N_F = " +
                          std::to_string(fock_cutoff) + ")");
    const CompositeOperators ops(hs);
    c.scalars["avg_overlap"] = sum / static_cast<double>(c.overlaps.size());
    c.scalars["min_overlap"] = worst;
    c.scalars["n_full_final"] = inner(full.states.back(), ops.n * full.states.back()).real();
    c.scalars["n_rabi_final"] = inner(rabi.states.back(), ops.n * rabi.states.back()).real();
    return c;
}

std::vector<QuenchCurve> compute_quench(const ExperimentConfig& config)
{
    config.validate();
    std::vector<QuenchCurve> out;
    for (double ratio : config.quench.ratios) {
        const double r = r_for_coupling_ratio(ratio, config.params);
        auto conv = adaptive_cutoff(
            [&](int n) {
                return quench_curve(config.params, r, config.quench.window, config.quench.points, n, config.tolerance);
            },
            config.cutoff);
        conv.result.target_ratio = ratio;
        conv.result.ladder = std::move(conv.ladder);
        out.push_back(std::move(conv.result));
    }
    return out;
}

// --- adiabatic --------------------------------------------------------------

AdiabaticResult adiabatic_run(const ModelParams& params, const DriveRamp& ramp, Frame frame, double dt_out,
                              double tolerance, int fock_cutoff, const AdiabaticOptions& options)
{
    ramp.validate();
    const HilbertSpec hs(fock_cutoff);
    const TimeGrid grid{0.0, ramp.t_f, dt_out, tolerance};
    const auto times = grid.times();
    const auto trajectory = alpha_trajectory(params, ramp, times);

    AdiabaticResult res;
    res.ramp = ramp;
    res.alpha_final = trajectory.alphas.back();
    cat_target(res.alpha_final, hs); // fail fast if the cutoff cannot hold the final cat

    const LindbladSpec spec = frame == Frame::squeezed ? lindblad_squeezed_frame_spec(params, ramp, hs)
                                                       : lindblad_lab_spec(params, ramp, hs);
    std::size_t index = 0;
    double f_last = 0.0, en_last = 0.0;
    std::optional<DensityMatrix> last;
    EvolveOptions<DensityMatrix> opt;
    opt.keep_states = false;
    opt.observer = [&](double t, const DensityMatrix& rho, ScalarRow& row) {
        const std::size_t k = index++;
        const double r = ramp_r(t, ramp).r;
        DensityMatrix state = rho;
        if (frame == Frame::lab) {
            Warnings w;
            state = to_squeezed_frame(rho, r, &w);
            if (!w.empty())
                throw CutoffError("lab-frame state cannot be mapped to the squeezed frame at N_F = " +
                                  std::to_string(fock_cutoff) + ": " + w.front().message);
        }
        const cplx alpha = trajectory.alphas[k];
        f_last = fidelity(state, cat_target(alpha, hs));
        en_last = log_negativity(state);
        row["F"] = f_last;
        row["E_N"] = en_last;
        if (options.keep_series) {
            res.series.t.push_back(t);
            res.series.fidelity.push_back(f_last);
            res.series.log_negativity.push_back(en_last);
            res.series.lambda.push_back(lambda_from_r(r, params.delta_c));
            res.series.alpha.push_back(alpha);
        }
        if (k + 1 == times.size() && options.keep_final_state)
            last = std::move(state);
    };
    const auto traj = evolve_lindblad(spec, DensityMatrix::pure(StateVector::basis(hs, 0, qubit_index::down)),
                                      grid, opt);
    if (options.keep_series) {
        res.series.trace = traj.series("trace");
        res.series.purity = traj.series("purity");
    }
    if (last)
        res.final_state = std::move(*last);
    res.scalars["F_final"] = f_last;
    res.scalars["EN_final"] = en_last;
    return res;
}

AdiabaticExperiment compute_adiabatic(const ExperimentConfig& config)
{
    config.validate();
    const auto& a = config.adiabatic;
    const DriveRamp ramp{a.r_max, a.tau, a.t_f};
    auto run_ramp = [&](const DriveRamp& rp) {
        return adaptive_cutoff(
            [&](int n) { return adiabatic_run(config.params, rp, config.frame, config.dt_out, config.tolerance, n); },
            config.cutoff);
    };
    AdiabaticExperiment out{run_ramp(ramp), std::nullopt, {}, std::nullopt, {}};

    WignerGridSpec wg;
    wg.re_min = wg.im_min = -a.wigner_extent;
    wg.re_max = wg.im_max = a.wigner_extent;
    wg.re_points = wg.im_points = a.wigner_points;
    out.wigner_final = wigner(partial_trace(out.main.result.final_state, Factor::cavity), wg);
    out.maxima = wigner_maxima(out.wigner_final);
    if (a.control_run) {
        out.control = run_ramp(DriveRamp{0.0, a.tau, a.t_f});
        out.wigner_control = wigner(partial_trace(out.control->result.final_state, Factor::cavity), wg);
    }
    return out;
}

// --- sweep ------------------------------------------------------------------

IdealPoint ideal_point(const ModelParams& params, double gain_db, const CutoffPolicy& policy, int max_cutoff)
{
    IdealPoint p;
    p.gain_db = gain_db;
    p.r = r_from_gain_db(gain_db);
    p.en_cat = cat_log_negativity(std::abs(adiabatic_alpha(p.r, params)));
    CutoffPolicy pol = policy;
    pol.max_cutoff = max_cutoff;
    struct Out {
        Scalars scalars;
    };
    try {
        auto conv = adaptive_cutoff(
            [&](int n) {
                const auto psi = ideal_rabi_ground_state(p.r, params, HilbertSpec(n));
                const double tail = fock_tail(psi);
                if (tail >= squeeze_tail_limit)
                    throw CutoffError("ideal ground state tail " + format_double(tail) + " at N_F = " +
                                      std::to_string(n));
                return Out{{{"EN_ideal", log_negativity(psi)}}};
            },
            pol);
        p.en_ideal = conv.result.scalars.at("EN_ideal");
        p.ladder = std::move(conv.ladder);
    } catch (const NumericalError& e) {
        p.failure = e.what();
    }
    return p;
}

SweepResult compute_sweep(const ExperimentConfig& config)
{
    config.validate();
    const auto& s = config.sweep;
    SweepResult out;
    for (double gdb : s.gains_db)
        for (double tau : s.taus)
            out.cells.push_back({gdb, tau, std::numeric_limits<double>::quiet_NaN(),
                                 std::numeric_limits<double>::quiet_NaN(), {}, {}});

    auto run_cell = [&](SweepCell& cell) {
        try {
            const DriveRamp ramp{r_from_gain_db(cell.gain_db), cell.tau, s.t_f_factor * cell.tau};
            const AdiabaticOptions lean{false, false};
            auto conv = adaptive_cutoff(
                [&](int n) {
                    return adiabatic_run(config.params, ramp, config.frame, config.dt_out, config.tolerance, n, lean);
                },
                config.cutoff);
            cell.f_final = conv.result.scalars.at("F_final");
            cell.en_final = conv.result.scalars.at("EN_final");
            cell.ladder = std::move(conv.ladder);
        } catch (const NumericalError& e) {
            cell.failure = e.what();
        }
    };

    unsigned workers = s.threads > 0 ? static_cast<unsigned>(s.threads) : std::thread::hardware_concurrency();
    workers = std::clamp<unsigned>(workers, 1u, static_cast<unsigned>(out.cells.size()));
    std::atomic<std::size_t> next{0};
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < out.cells.size(); i = next++)
                    run_cell(out.cells[i]);
            });
    }
    for (double gdb : s.gains_db)
        out.ideal.push_back(ideal_point(config.params, gdb, config.cutoff, s.ideal_max_cutoff));
    return out;
}

// --- files ------------------------------------------------------------------

std::string wigner_csv(const WignerGrid& grid)
{
    std::string out = "im\\re";
    for (double x : grid.re_axis)
        out += "," + format_double(x);
    out += '\n';
    for (std::size_t i = 0; i < grid.im_axis.size(); ++i) {
        out += format_double(grid.im_axis[i]);
        for (std::size_t j = 0; j < grid.re_axis.size(); ++j)
            out += "," + format_double(grid.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        out += '\n';
    }
    return out;
}

namespace {

void record_ladder(Manifest& m, const std::string& prefix, const CutoffLadder& ladder)
{
    m.set("cutoff", prefix + "ladder", ladder.sequence());
    m.set("cutoff", prefix + "deltas", ladder.deltas());
    m.set("cutoff", prefix + "converged_at", ladder.converged_at < 0 ? std::string("fixed")
                                                                      : std::to_string(ladder.converged_at));
    m.set("cutoff", prefix + "used", std::to_string(ladder.used));
}

void record_warnings(Manifest& m, const std::string& prefix, const Warnings& warnings)
{
    for (std::size_t i = 0; i < warnings.size(); ++i)
        m.set("warnings", prefix + warnings[i].code + "." + std::to_string(i), warnings[i].message);
}

class OutputDir {
public:
    OutputDir(std::filesystem::path dir, RunOutcome& outcome) : dir_(std::move(dir)), outcome_(outcome) {}

    void write(const std::string& name, const std::string& contents)
    {
        write_atomic(dir_ / name, contents);
        outcome_.files.push_back(name);
    }

private:
    std::filesystem::path dir_;
    RunOutcome& outcome_;
};

void spectrum_files(const ExperimentConfig& config, OutputDir& dir, Manifest& m)
{
    const auto curves = compute_spectrum(config);
    CsvTable csv({"gain_db", "omega", "abs_S", "re_S", "im_S"});
    for (const auto& c : curves) {
        const std::string p = "gain_" + key_number(c.gain_db) + ".";
        for (std::size_t k = 0; k < c.spectrum.omegas.size(); ++k) {
            const cplx s = c.spectrum.s_values[k];
            csv.add_row({c.gain_db, c.spectrum.omegas[k], std::abs(s), s.real(), s.imag()});
        }
        m.set("results", p + "r", c.r);
        m.set("results", p + "delta_q", c.params.delta_q);
        m.set("results", p + "g_tilde", enhanced_coupling(c.r, c.params.g));
        m.set("results", p + "method", c.spectrum.method);
        m.set("results", p + "scale", c.spectrum.scale);
        m.set("results", p + "t_window", c.spectrum.t_window);
        m.set("results", p + "achieved_decay", c.spectrum.achieved_decay);
        m.set("peaks", p + "count", std::to_string(c.peaks.size()));
        for (std::size_t i = 0; i < c.peaks.size(); ++i) {
            const std::string q = p + std::to_string(i) + ".";
            m.set("peaks", q + "omega", c.peaks[i].omega);
            m.set("peaks", q + "height", c.peaks[i].height);
            m.set("peaks", q + "fwhm", c.peaks[i].fwhm);
        }
        if (c.peaks.size() == 2)
            m.set("peaks", p + "splitting", c.peaks[1].omega - c.peaks[0].omega);
        record_ladder(m, p, c.ladder);
        record_warnings(m, p, c.spectrum.warnings);
    }
    m.set("results", "normalization", SpectrumResult::normalization);
    dir.write("spectrum.csv", csv.str());
}

void quench_files(const ExperimentConfig& config, OutputDir& dir, Manifest& m)
{
    const auto curves = compute_quench(config);
    CsvTable csv({"target_ratio", "t", "omega_c_t", "overlap"});
    for (const auto& c : curves) {
        const std::string p = "ratio_" + key_number(c.target_ratio) + ".";
        for (std::size_t k = 0; k < c.times.size(); ++k)
            csv.add_row({c.target_ratio, c.times[k], c.omega_c * c.times[k], c.overlaps[k]});
        m.set("results", p + "r", c.r);
        m.set("results", p + "omega_c", c.omega_c);
        for (const auto& [k, v] : c.scalars)
            m.set("results", p + k, v);
        record_ladder(m, p, c.ladder);
    }
    dir.write("quench.csv", csv.str());
}

void adiabatic_files(const ExperimentConfig& config, OutputDir& dir, Manifest& m)
{
    const auto ex = compute_adiabatic(config);
    const auto& res = ex.main.result;
    CsvTable csv({"t", "F", "E_N", "lambda", "re_alpha", "im_alpha", "trace", "purity"});
    const auto& s = res.series;
    for (std::size_t k = 0; k < s.t.size(); ++k)
        csv.add_row({s.t[k], s.fidelity[k], s.log_negativity[k], s.lambda[k], s.alpha[k].real(), s.alpha[k].imag(),
                     s.trace[k], s.purity[k]});
    dir.write("adiabatic.csv", csv.str());
    dir.write("wigner_final.csv", wigner_csv(ex.wigner_final));

    const double r_final = ramp_r(res.ramp.t_f, res.ramp).r;
    m.set("results", "F_final", res.scalars.at("F_final"));
    m.set("results", "EN_final", res.scalars.at("EN_final"));
    m.set("results", "r_final", r_final);
    m.set("results", "re_alpha_final", res.alpha_final.real());
    m.set("results", "im_alpha_final", res.alpha_final.imag());
    m.set("results", "alpha_adiabatic_final", adiabatic_alpha(r_final, config.params));
    m.set("results", "wigner_integral", ex.wigner_final.integral);
    m.set("results", "wigner_maxima", std::to_string(ex.maxima.size()));
    for (std::size_t i = 0; i < ex.maxima.size(); ++i) {
        m.set("results", "wigner_max" + std::to_string(i) + ".re", ex.maxima[i].beta.real());
        m.set("results", "wigner_max" + std::to_string(i) + ".im", ex.maxima[i].beta.imag());
        m.set("results", "wigner_max" + std::to_string(i) + ".value", ex.maxima[i].value);
    }
    m.set("results", "wigner_convention", WignerGrid::convention);
    record_ladder(m, "", ex.main.ladder);
    record_warnings(m, "wigner_final.", ex.wigner_final.warnings);
    if (ex.control) {
        const auto& g = *ex.wigner_control;
        dir.write("wigner_nodrive.csv", wigner_csv(g));
        const auto zero = std::min_element(g.re_axis.begin(), g.re_axis.end(),
                                           [](double x, double y) { return std::abs(x) < std::abs(y); }) -
                          g.re_axis.begin();
        const auto zero_im = std::min_element(g.im_axis.begin(), g.im_axis.end(),
                                              [](double x, double y) { return std::abs(x) < std::abs(y); }) -
                             g.im_axis.begin();
        m.set("results", "nodrive.F_final", ex.control->result.scalars.at("F_final"));
        m.set("results", "nodrive.EN_final", ex.control->result.scalars.at("EN_final"));
        m.set("results", "nodrive.W_origin", g.values(zero_im, zero));
        record_ladder(m, "nodrive.", ex.control->ladder);
        record_warnings(m, "wigner_nodrive.", g.warnings);
    }
}

void sweep_files(const ExperimentConfig& config, OutputDir& dir, Manifest& m)
{
    const auto res = compute_sweep(config);
    CsvTable csv({"r_max_db", "tau", "F_final", "EN_final"});
    for (const auto& c : res.cells) {
        csv.add_row({c.gain_db, c.tau, c.f_final, c.en_final});
        const std::string p = "cell_" + key_number(c.gain_db) + "_" + key_number(c.tau) + ".";
        if (c.failure.empty())
            record_ladder(m, p, c.ladder);
        else
            m.set("failures", p + "error", c.failure);
    }
    CsvTable ideal({"r_max_db", "r_max", "EN_ideal", "EN_cat"});
    for (const auto& p : res.ideal) {
        ideal.add_row({p.gain_db, p.r, p.en_ideal, p.en_cat});
        const std::string q = "ideal_" + key_number(p.gain_db) + ".";
        if (p.failure.empty())
            record_ladder(m, q, p.ladder);
        else
            m.set("failures", q + "error", p.failure);
    }
    m.set("results", "cells", std::to_string(res.cells.size()));
    m.set("results", "failed_cells",
          std::to_string(std::count_if(res.cells.begin(), res.cells.end(),
                                       [](const SweepCell& c) { return !c.failure.empty(); })));
    dir.write("sweep.csv", csv.str());
    dir.write("sweep_ideal.csv", ideal.str());
}

std::string utc_now()
{
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace

RunOutcome run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir)
{
    config.validate();
    std::filesystem::create_directories(out_dir);
    RunOutcome outcome;
    Manifest& m = outcome.manifest;
    m.set("run", "tool", tool_version);
    m.set("run", "experiment", to_string(config.experiment));
    m.set("run", "started_utc", utc_now());
    for (const auto& [k, v] : config.describe())
        m.set("config", k, v);

    const auto start = std::chrono::steady_clock::now();
    OutputDir dir(out_dir, outcome);
    switch (config.experiment) {
    case Experiment::spectrum:
        spectrum_files(config, dir, m);
        break;
    case Experiment::quench:
        quench_files(config, dir, m);
        break;
    case Experiment::adiabatic:
        adiabatic_files(config, dir, m);
        break;
    case Experiment::sweep:
        sweep_files(config, dir, m);
        break;
    }
    m.set("run", "wall_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    for (const auto& f : outcome.files)
        m.set("files", f, "sha256:" + sha256_file(out_dir / f));
    write_atomic(out_dir / "manifest.txt", m.str());
    return outcome;
}

} // namespace synthcoupling::cli
