#include "synthcoupling/cli/cutoff.hpp"

#include <algorithm>

#include "synthcoupling/cli/output.hpp"

namespace synthcoupling::cli {

std::string CutoffLadder::sequence() const
{
    std::string out;
    for (const auto& r : rungs) {
        if (!out.empty())
            out += ", ";
        out += std::to_string(r.cutoff);
        if (!r.failure.empty())
            out += "!";
    }
    return out;
}

std::string CutoffLadder::deltas() const
{
    std::string out;
    for (const auto& r : rungs) {
        if (!out.empty())
            out += ", ";
        out += format_double(r.max_delta);
    }
    return out;
}

double relative_change(double a, double b, double floor)
{
    if (std::isnan(a) || std::isnan(b))
        return std::numeric_limits<double>::infinity();
    const double scale = std::max(std::abs(a), std::abs(b));
    if (scale <= floor)
        return 0.0;
    return std::abs(a - b) / scale;
}

double max_relative_change(const std::map<std::string, double>& a, const std::map<std::string, double>& b)
{
    if (a.size() != b.size())
        return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (const auto& [key, va] : a) {
        const auto it = b.find(key);
        if (it == b.end())
            return std::numeric_limits<double>::infinity();
        worst = std::max(worst, relative_change(va, it->second));
    }
    return worst;
}

} // namespace synthcoupling::cli
