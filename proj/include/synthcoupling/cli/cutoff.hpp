#pragma once

// Fock-cutoff escalation. A run closure maps N_F to a result carrying a
// `scalars` map; the closure is re-run on a growing ladder of cutoffs until
// every scalar agrees between two successive rungs.

#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "synthcoupling/cli/config.hpp"
#include "synthcoupling/errors.hpp"

namespace synthcoupling::cli {

struct CutoffRung {
    int cutoff = 0;
    // Largest relative change against the previous rung; NaN when there was
    // nothing to compare (first rung, or this or the previous rung failed).
    double max_delta = std::numeric_limits<double>::quiet_NaN();
    std::string failure; // non-empty when the run raised CutoffError
};

struct CutoffLadder {
    std::vector<CutoffRung> rungs;
    int converged_at = -1; // smaller cutoff of the agreeing pair; -1 if fixed
    int used = -1;         // cutoff whose result is reported

    std::string sequence() const;
    std::string deltas() const;
};

/// |a - b| / max(|a|, |b|), or 0 when both are below `floor`; infinite on NaN.
double relative_change(double a, double b, double floor = 1e-10);

double max_relative_change(const std::map<std::string, double>& a, const std::map<std::string, double>& b);

template <class Result>
struct Converged {
    Result result;
    CutoffLadder ladder;
};

template <class Run>
auto adaptive_cutoff(Run&& run, const CutoffPolicy& policy) -> Converged<std::invoke_result_t<Run&, int>>
{
    using Result = std::invoke_result_t<Run&, int>;
    CutoffLadder ladder;
    if (policy.fixed) {
        Result r = run(policy.initial);
        ladder.rungs.push_back({policy.initial, std::numeric_limits<double>::quiet_NaN(), {}});
        ladder.used = policy.initial;
        return {std::move(r), std::move(ladder)};
    }
    policy.validate();
    bool have_previous = false;
    Result previous{};
    int previous_cutoff = 0;
    for (int cutoff = policy.initial; cutoff <= policy.max_cutoff; cutoff = policy.next(cutoff)) {
        CutoffRung rung{cutoff, std::numeric_limits<double>::quiet_NaN(), {}};
        try {
            Result current = run(cutoff);
            if (have_previous) {
                rung.max_delta = max_relative_change(previous.scalars, current.scalars);
                if (rung.max_delta < policy.threshold) {
                    ladder.rungs.push_back(rung);
                    ladder.converged_at = previous_cutoff;
                    ladder.used = cutoff;
                    return {std::move(current), std::move(ladder)};
                }
            }
            previous = std::move(current);
            previous_cutoff = cutoff;
            have_previous = true;
        } catch (const CutoffError& e) {
            rung.failure = e.what();
            have_previous = false;
        }
        ladder.rungs.push_back(std::move(rung));
    }
    throw CutoffError("no convergence up to cutoff.max = " + std::to_string(policy.max_cutoff) +
                      " (ladder " + ladder.sequence() + ", deltas " + ladder.deltas() + ")");
}

} // namespace synthcoupling::cli
