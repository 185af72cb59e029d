#ifndef SIEVE_CALIBRATE_HPP
#define SIEVE_CALIBRATE_HPP

#include "sieve/error.hpp"
#include "sieve/filter.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sieve {

// The search space of the calibrator: a single relaxation knob t in [0,1]
// that moves every parameter linearly from its tight end (t=0) to its
// loose end (t=1). Range alphas grow with t while min_sem_sim falls, so
// the candidate count is monotone non-decreasing in t.
struct ParamBounds {
    FilterParams tight;
    FilterParams loose;
};

// tight = everything zero with min_sem_sim 0.6; loose covers the database:
// alpha_sent = the n_sent spread, alpha_wps 20, alpha_hdiff 5, alpha_hpw 1,
// min_sem_sim 0.
ParamBounds default_bounds(const PassageDatabase& db);

// Integer parameters round to the nearest grid value (llround), which
// keeps them monotone in t.
FilterParams params_at(const ParamBounds& bounds, double t);

struct CalibrationSpec {
    int target_count = 5;
    ParamBounds bounds;
    // When given, replaces bounds.tight as the t=0 end; must lie inside
    // the bounds.
    std::optional<FilterParams> base_params;
    int max_evals = 100;
    // t is searched on the grid {0, 1/resolution, ..., 1}.
    int resolution = 1000;
};

void validate(const CalibrationSpec& spec);

// JSON: {"target_count":int, "bounds":{"tight":{...},"loose":{...}},
// "base_params":{...}, "max_evals":int, "resolution":int}; every field is
// optional and falls back to `defaults` (parameter objects use the
// FilterParams schema).
CalibrationSpec load_calibration_spec(const std::string& path, const CalibrationSpec& defaults);

struct CalibrationResult {
    FilterParams params;
    int achieved_count = 0;
    bool exact = false;
    int evals_used = 0;
    double t = 0.0;
    // Nearest achievable counts around an unreachable target; -1 when not
    // applicable (exact hit, or nothing tighter/looser was evaluated).
    int count_below = -1;
    int count_above = -1;
};

class CalibrationBudgetError : public Error {
public:
    CalibrationBudgetError(const std::string& msg, CalibrationResult best_so_far)
        : Error(msg), best(std::move(best_so_far)) {}
    CalibrationResult best;
};

// Binary search for the smallest grid t whose candidate count reaches the
// target. When the count jumps past the target, the result is whichever
// side minimizes |count - target|, ties broken toward the tighter t;
// exact is true only when the target itself was hit. A target beyond the
// loosest bounds returns the achieved maximum with exact=false. Exhausting
// max_evals throws CalibrationBudgetError carrying the best point so far.
CalibrationResult calibrate(const PassageDatabase& db, const Passage& gold,
                            const CalibrationSpec& spec, int workers = 1);

// Diagnostic sampling of the relaxation curve at `points` evenly spaced t
// values (points >= 2). The returned counts are checked non-decreasing.
std::vector<std::pair<double, int>> count_curve(const PassageDatabase& db, const Passage& gold,
                                                const CalibrationSpec& spec, int points,
                                                int workers = 1);

} // namespace sieve

#endif // SIEVE_CALIBRATE_HPP
