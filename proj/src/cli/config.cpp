#include "synthcoupling/cli/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "synthcoupling/cli/output.hpp"

namespace synthcoupling::cli {

Experiment parse_experiment(const std::string& name)
{
    if (name == "spectrum")
        return Experiment::spectrum;
    if (name == "quench")
        return Experiment::quench;
    if (name == "adiabatic")
        return Experiment::adiabatic;
    if (name == "sweep")
        return Experiment::sweep;
    throw ConfigError("unknown experiment '" + name + "' (expected spectrum, quench, adiabatic or sweep)");
}

std::string to_string(Experiment e)
{
    switch (e) {
    case Experiment::spectrum:
        return "spectrum";
    case Experiment::quench:
        return "quench";
    case Experiment::adiabatic:
        return "adiabatic";
    case Experiment::sweep:
        return "sweep";
    }
    return "?";
}

Frame parse_frame(const std::string& name)
{
    if (name == "squeezed")
        return Frame::squeezed;
    if (name == "lab")
        return Frame::lab;
    throw ConfigError("unknown frame '" + name + "' (expected lab or squeezed)");
}

std::string to_string(Frame f)
{
    return f == Frame::lab ? "lab" : "squeezed";
}

void CutoffPolicy::validate() const
{
    if (initial < 8)
        throw ConfigError("cutoff.initial must be at least 8");
    if (!(growth > 1.0) || !std::isfinite(growth))
        throw ConfigError("cutoff.growth must exceed 1");
    if (!(threshold > 0.0))
        throw ConfigError("cutoff.threshold must be positive");
    if (!fixed && max_cutoff < initial)
        throw ConfigError("cutoff.max must be at least cutoff.initial");
}

int CutoffPolicy::next(int cutoff) const
{
    return std::max(cutoff + 1, static_cast<int>(std::ceil(cutoff * growth - 1e-9)));
}

namespace {

void require(bool ok, const std::string& message)
{
    if (!ok)
        throw ConfigError(message);
}

void require_positive_list(const std::vector<double>& values, const std::string& key)
{
    require(!values.empty(), key + " must not be empty");
    for (double v : values)
        require(std::isfinite(v) && v > 0.0, key + " entries must be positive");
}

} // namespace

void ExperimentConfig::validate() const
{
    params.validate();
    cutoff.validate();
    require(std::isfinite(dt_out) && dt_out > 0.0, "dt_out must be positive");
    require(tolerance > 0.0 && tolerance < 1e-2, "tolerance must lie in (0, 1e-2)");
    require(frame == Frame::squeezed || experiment == Experiment::adiabatic || experiment == Experiment::sweep,
            "frame = lab is only available for the adiabatic and sweep experiments");
    switch (experiment) {
    case Experiment::spectrum:
        require(!spectrum.gains_db.empty(), "spectrum.gains_db must not be empty");
        for (double gdb : spectrum.gains_db)
            require(std::isfinite(gdb) && gdb >= 0.0, "spectrum.gains_db entries must be non-negative");
        require(spectrum.window > 0.0, "spectrum.window must be positive");
        require(spectrum.t_max > 0.0, "spectrum.t_max must be positive");
        require(spectrum.decay_ratio > 0.0 && spectrum.decay_ratio < 1.0, "spectrum.decay_ratio must lie in (0, 1)");
        require(spectrum.padding >= 1, "spectrum.padding must be at least 1");
        break;
    case Experiment::quench:
        require_positive_list(quench.ratios, "quench.ratios");
        require(quench.window > 0.0, "quench.window must be positive");
        require(quench.points >= 2, "quench.points must be at least 2");
        break;
    case Experiment::adiabatic:
        DriveRamp{adiabatic.r_max, adiabatic.tau, adiabatic.t_f}.validate();
        require(adiabatic.t_f > 0.0, "adiabatic.t_f must be positive");
        require(adiabatic.wigner_extent > 0.0, "wigner.extent must be positive");
        require(adiabatic.wigner_points >= 3, "wigner.points must be at least 3");
        break;
    case Experiment::sweep:
        require(!sweep.gains_db.empty() && !sweep.taus.empty(), "sweep.gains_db and sweep.taus must not be empty");
        for (double gdb : sweep.gains_db)
            require(std::isfinite(gdb) && gdb >= 0.0, "sweep.gains_db entries must be non-negative");
        require_positive_list(sweep.taus, "sweep.taus");
        require(sweep.t_f_factor > 0.0, "sweep.t_f_factor must be positive");
        require(sweep.threads >= 0, "sweep.threads must be non-negative");
        require(sweep.ideal_max_cutoff >= cutoff.initial, "sweep.ideal_max_cutoff must be at least cutoff.initial");
        break;
    }
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::describe() const
{
    std::vector<std::pair<std::string, std::string>> out;
    auto num = [&](const std::string& k, double v) { out.emplace_back(k, format_double(v)); };
    auto list = [&](const std::string& k, const std::vector<double>& v) { out.emplace_back(k, format_list(v)); };
    auto flag = [&](const std::string& k, bool v) { out.emplace_back(k, v ? "true" : "false"); };
    out.emplace_back("experiment", to_string(experiment));
    num("delta_c", params.delta_c);
    num("delta_q", params.delta_q);
    num("g", params.g);
    num("kappa", params.kappa);
    num("gamma", params.gamma);
    num("dt_out", dt_out);
    num("tolerance", tolerance);
    out.emplace_back("frame", to_string(frame));
    num("cutoff.initial", cutoff.initial);
    num("cutoff.growth", cutoff.growth);
    num("cutoff.threshold", cutoff.threshold);
    num("cutoff.max", cutoff.max_cutoff);
    flag("cutoff.fixed", cutoff.fixed);
    switch (experiment) {
    case Experiment::spectrum:
        list("spectrum.gains_db", spectrum.gains_db);
        flag("spectrum.resonant", spectrum.resonant);
        num("spectrum.window", spectrum.window);
        num("spectrum.t_max", spectrum.t_max);
        num("spectrum.decay_ratio", spectrum.decay_ratio);
        num("spectrum.padding", spectrum.padding);
        break;
    case Experiment::quench:
        list("quench.ratios", quench.ratios);
        num("quench.window", quench.window);
        num("quench.points", quench.points);
        break;
    case Experiment::adiabatic:
        num("adiabatic.r_max", adiabatic.r_max);
        num("adiabatic.tau", adiabatic.tau);
        num("adiabatic.t_f", adiabatic.t_f);
        flag("adiabatic.control", adiabatic.control_run);
        num("wigner.extent", adiabatic.wigner_extent);
        num("wigner.points", adiabatic.wigner_points);
        break;
    case Experiment::sweep:
        list("sweep.gains_db", sweep.gains_db);
        list("sweep.taus", sweep.taus);
        num("sweep.t_f_factor", sweep.t_f_factor);
        num("sweep.threads", sweep.threads);
        num("sweep.ideal_max_cutoff", sweep.ideal_max_cutoff);
        break;
    }
    return out;
}

ExperimentConfig default_config(Experiment experiment)
{
    ExperimentConfig c;
    c.experiment = experiment;
    switch (experiment) {
    case Experiment::spectrum:
        c.params.g = 1e-4;
        c.params.kappa = 5e-4;
        c.params.gamma = 5e-4;
        c.params.delta_q = 1.0;
        c.cutoff.initial = 8;
        c.cutoff.max_cutoff = 24;
        break;
    case Experiment::quench:
        c.params.g = 0.05;
        c.params.delta_q = 0.1;
        c.cutoff.max_cutoff = 96;
        break;
    case Experiment::adiabatic:
    case Experiment::sweep:
        c.params.g = 0.1;
        c.params.kappa = 1e-4;
        c.params.gamma = 5e-5;
        break;
    }
    return c;
}

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& text)
{
    double v = 0.0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v))
        throw ConfigError("'" + text + "' is not a finite number");
    return v;
}

int parse_int(const std::string& text)
{
    int v = 0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end)
        throw ConfigError("'" + text + "' is not an integer");
    return v;
}

bool parse_bool(const std::string& text)
{
    if (text == "true" || text == "yes" || text == "1")
        return true;
    if (text == "false" || text == "no" || text == "0")
        return false;
    throw ConfigError("'" + text + "' is not a boolean (true/false)");
}

std::vector<double> parse_list(const std::string& text)
{
    std::vector<double> out;
    if (text.empty())
        return out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(parse_number(trim(item)));
    return out;
}

struct Entry {
    std::string value;
    int line;
};

} // namespace

ExperimentConfig parse_config(const std::string& text, std::optional<Experiment> fallback)
{
    std::map<std::string, Entry> entries;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw.substr(0, raw.find('#')));
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        if (entries.count(key))
            throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        entries[key] = {trim(line.substr(eq + 1)), line_no};
    }

    Experiment experiment = fallback.value_or(Experiment::adiabatic);
    if (auto it = entries.find("experiment"); it != entries.end()) {
        experiment = parse_experiment(it->second.value);
        entries.erase(it);
    } else if (!fallback) {
        throw ConfigError("config does not name an experiment");
    }
    ExperimentConfig c = default_config(experiment);

    bool t_f_given = false, r_given = false, gain_given = false;
    double gain_db = 0.0;
    const std::map<std::string, std::function<void(const std::string&)>> setters = {
        {"delta_c", [&](const std::string& v) { c.params.delta_c = parse_number(v); }},
        {"delta_q", [&](const std::string& v) { c.params.delta_q = parse_number(v); }},
        {"g", [&](const std::string& v) { c.params.g = parse_number(v); }},
        {"kappa", [&](const std::string& v) { c.params.kappa = parse_number(v); }},
        {"gamma", [&](const std::string& v) { c.params.gamma = parse_number(v); }},
        {"dt_out", [&](const std::string& v) { c.dt_out = parse_number(v); }},
        {"tolerance", [&](const std::string& v) { c.tolerance = parse_number(v); }},
        {"frame", [&](const std::string& v) { c.frame = parse_frame(v); }},
        {"cutoff.initial", [&](const std::string& v) { c.cutoff.initial = parse_int(v); }},
        {"cutoff.growth", [&](const std::string& v) { c.cutoff.growth = parse_number(v); }},
        {"cutoff.threshold", [&](const std::string& v) { c.cutoff.threshold = parse_number(v); }},
        {"cutoff.max", [&](const std::string& v) { c.cutoff.max_cutoff = parse_int(v); }},
        {"cutoff.fixed", [&](const std::string& v) { c.cutoff.fixed = parse_bool(v); }},
        {"spectrum.gains_db", [&](const std::string& v) { c.spectrum.gains_db = parse_list(v); }},
        {"spectrum.resonant", [&](const std::string& v) { c.spectrum.resonant = parse_bool(v); }},
        {"spectrum.window", [&](const std::string& v) { c.spectrum.window = parse_number(v); }},
        {"spectrum.t_max", [&](const std::string& v) { c.spectrum.t_max = parse_number(v); }},
        {"spectrum.decay_ratio", [&](const std::string& v) { c.spectrum.decay_ratio = parse_number(v); }},
        {"spectrum.padding", [&](const std::string& v) { c.spectrum.padding = parse_int(v); }},
        {"quench.ratios", [&](const std::string& v) { c.quench.ratios = parse_list(v); }},
        {"quench.window", [&](const std::string& v) { c.quench.window = parse_number(v); }},
        {"quench.points", [&](const std::string& v) { c.quench.points = parse_int(v); }},
        {"adiabatic.r_max", [&](const std::string& v) { c.adiabatic.r_max = parse_number(v); r_given = true; }},
        {"adiabatic.gain_db", [&](const std::string& v) { gain_db = parse_number(v); gain_given = true; }},
        {"adiabatic.tau", [&](const std::string& v) { c.adiabatic.tau = parse_number(v); }},
        {"adiabatic.t_f", [&](const std::string& v) { c.adiabatic.t_f = parse_number(v); t_f_given = true; }},
        {"adiabatic.control", [&](const std::string& v) { c.adiabatic.control_run = parse_bool(v); }},
        {"wigner.extent", [&](const std::string& v) { c.adiabatic.wigner_extent = parse_number(v); }},
        {"wigner.points", [&](const std::string& v) { c.adiabatic.wigner_points = parse_int(v); }},
        {"sweep.gains_db", [&](const std::string& v) { c.sweep.gains_db = parse_list(v); }},
        {"sweep.taus", [&](const std::string& v) { c.sweep.taus = parse_list(v); }},
        {"sweep.t_f_factor", [&](const std::string& v) { c.sweep.t_f_factor = parse_number(v); }},
        {"sweep.threads", [&](const std::string& v) { c.sweep.threads = parse_int(v); }},
        {"sweep.ideal_max_cutoff", [&](const std::string& v) { c.sweep.ideal_max_cutoff = parse_int(v); }},
    };
    for (const auto& [key, entry] : entries) {
        const auto it = setters.find(key);
        if (it == setters.end())
            throw ConfigError("config line " + std::to_string(entry.line) + ": unknown key '" + key + "'");
        try {
            it->second(entry.value);
        } catch (const ConfigError& e) {
            throw ConfigError("config line " + std::to_string(entry.line) + " (" + key + "): " + e.what());
        }
    }
    if (r_given && gain_given)
        throw ConfigError("give either adiabatic.r_max or adiabatic.gain_db, not both");
    if (gain_given)
        c.adiabatic.r_max = r_from_gain_db(gain_db);
    if (!t_f_given)
        c.adiabatic.t_f = 5.0 * c.adiabatic.tau;
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path, std::optional<Experiment> fallback)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), fallback);
}

} // namespace synthcoupling::cli
