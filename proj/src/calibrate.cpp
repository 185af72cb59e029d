#include "sieve/calibrate.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

namespace sieve {

ParamBounds default_bounds(const PassageDatabase& db) {
    ParamBounds b;
    b.tight = FilterParams{0, 0.0, 0, 0.0, 0.6};
    int min_sent = std::numeric_limits<int>::max();
    int max_sent = 0;
    for (const auto& p : db.passages) {
        if (!p.features)
            throw Error("passage " + p.id + " has no features; run extraction first");
        min_sent = std::min(min_sent, p.features->n_sent);
        max_sent = std::max(max_sent, p.features->n_sent);
    }
    int spread = db.empty() ? 0 : max_sent - min_sent;
    b.loose = FilterParams{spread, 20.0, 5, 1.0, 0.0};
    return b;
}

FilterParams params_at(const ParamBounds& bounds, double t) {
    auto lerp = [t](double lo, double hi) { return lo + t * (hi - lo); };
    FilterParams p;
    p.alpha_sent = static_cast<int>(
        std::llround(lerp(bounds.tight.alpha_sent, bounds.loose.alpha_sent)));
    p.alpha_wps = lerp(bounds.tight.alpha_wps, bounds.loose.alpha_wps);
    p.alpha_hdiff = static_cast<int>(
        std::llround(lerp(bounds.tight.alpha_hdiff, bounds.loose.alpha_hdiff)));
    p.alpha_hpw = lerp(bounds.tight.alpha_hpw, bounds.loose.alpha_hpw);
    p.min_sem_sim = lerp(bounds.tight.min_sem_sim, bounds.loose.min_sem_sim);
    return p;
}

void validate(const CalibrationSpec& spec) {
    if (spec.target_count <= 0)
        throw Error("target_count must be positive");
    if (spec.max_evals <= 0)
        throw Error("max_evals must be positive");
    if (spec.resolution < 1)
        throw Error("resolution must be >= 1");
    const FilterParams& lo = spec.bounds.tight;
    const FilterParams& hi = spec.bounds.loose;
    validate(lo);
    validate(hi);
    if (hi.alpha_sent < lo.alpha_sent || hi.alpha_wps < lo.alpha_wps ||
        hi.alpha_hdiff < lo.alpha_hdiff || hi.alpha_hpw < lo.alpha_hpw ||
        hi.min_sem_sim > lo.min_sem_sim)
        throw Error("bounds.loose must be at least as permissive as bounds.tight");
    bool degenerate = hi.alpha_sent == lo.alpha_sent && hi.alpha_wps == lo.alpha_wps &&
                      hi.alpha_hdiff == lo.alpha_hdiff && hi.alpha_hpw == lo.alpha_hpw &&
                      hi.min_sem_sim == lo.min_sem_sim;
    if (degenerate)
        throw Error("degenerate bounds: tight and loose ends are identical");
    if (spec.base_params) {
        const FilterParams& b = *spec.base_params;
        validate(b);
        if (b.alpha_sent < lo.alpha_sent || b.alpha_sent > hi.alpha_sent ||
            b.alpha_wps < lo.alpha_wps || b.alpha_wps > hi.alpha_wps ||
            b.alpha_hdiff < lo.alpha_hdiff || b.alpha_hdiff > hi.alpha_hdiff ||
            b.alpha_hpw < lo.alpha_hpw || b.alpha_hpw > hi.alpha_hpw ||
            b.min_sem_sim > lo.min_sem_sim || b.min_sem_sim < hi.min_sem_sim)
            throw Error("base_params lie outside the calibration bounds");
    }
}

CalibrationSpec load_calibration_spec(const std::string& path, const CalibrationSpec& defaults) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open calibration spec: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(buffer.str());
    } catch (const nlohmann::json::exception& e) {
        throw Error(path + ": malformed JSON: " + e.what());
    }
    for (const auto& [key, value] : j.items()) {
        if (key != "target_count" && key != "bounds" && key != "base_params" &&
            key != "max_evals" && key != "resolution")
            throw Error(path + ": unknown key '" + key + "'");
    }
    CalibrationSpec spec = defaults;
    try {
        if (j.contains("target_count"))
            spec.target_count = j.at("target_count").get<int>();
        if (j.contains("max_evals"))
            spec.max_evals = j.at("max_evals").get<int>();
        if (j.contains("resolution"))
            spec.resolution = j.at("resolution").get<int>();
        if (j.contains("bounds")) {
            spec.bounds.tight =
                filter_params_from_json_text(j.at("bounds").at("tight").dump(), path);
            spec.bounds.loose =
                filter_params_from_json_text(j.at("bounds").at("loose").dump(), path);
        }
        if (j.contains("base_params"))
            spec.base_params = filter_params_from_json_text(j.at("base_params").dump(), path);
    } catch (const nlohmann::json::exception& e) {
        throw Error(path + ": " + e.what());
    }
    return spec;
}

namespace {

struct Evaluator {
    const PassageDatabase& db;
    const Passage& gold;
    const ParamBounds& bounds;
    int resolution;
    int max_evals;
    int workers;
    int target;

    int evals = 0;
    CalibrationResult best; // closest |count - target| seen, tie -> smaller t
    bool have_best = false;

    int count_at(int k) {
        if (evals + 1 > max_evals)
            throw CalibrationBudgetError(
                "calibration budget exhausted after " + std::to_string(evals) + " evaluations",
                best);
        ++evals;
        double t = static_cast<double>(k) / static_cast<double>(resolution);
        FilterParams params = params_at(bounds, t);
        int count = static_cast<int>(run_pipeline(db, gold, params, workers).candidates.size());
        int dist = std::abs(count - target);
        if (!have_best || dist < std::abs(best.achieved_count - target) ||
            (dist == std::abs(best.achieved_count - target) && t < best.t)) {
            best = CalibrationResult{params, count, count == target, evals, t, -1, -1};
            have_best = true;
        }
        return count;
    }
};

} // namespace

CalibrationResult calibrate(const PassageDatabase& db, const Passage& gold,
                            const CalibrationSpec& spec, int workers) {
    validate(spec);
    ParamBounds bounds = spec.bounds;
    if (spec.base_params)
        bounds.tight = *spec.base_params;
    const int R = spec.resolution;
    Evaluator eval{db, gold, bounds, R, spec.max_evals, workers, spec.target_count, 0, {}, false};

    auto result_at = [&](int k, int count) {
        CalibrationResult r;
        r.t = static_cast<double>(k) / static_cast<double>(R);
        r.params = params_at(bounds, r.t);
        r.achieved_count = count;
        r.exact = count == spec.target_count;
        r.evals_used = eval.evals;
        return r;
    };

    int c_loose = eval.count_at(R);
    if (c_loose < spec.target_count) {
        // the loosest setting cannot reach the target; report the maximum
        CalibrationResult r = result_at(R, c_loose);
        r.count_below = c_loose;
        return r;
    }
    int c_tight = eval.count_at(0);
    if (c_tight > c_loose)
        throw Error("relaxation curve is not monotone (tight end yields more than loose end)");
    if (c_tight >= spec.target_count) {
        CalibrationResult r = result_at(0, c_tight);
        if (!r.exact)
            r.count_above = c_tight; // nothing tighter exists on the grid
        return r;
    }

    int lo = 0, hi = R;
    int c_lo = c_tight, c_hi = c_loose;
    while (hi - lo > 1) {
        int mid = lo + (hi - lo) / 2;
        int c_mid = eval.count_at(mid);
        if (c_mid < c_lo || c_mid > c_hi)
            throw Error("relaxation curve is not monotone");
        if (c_mid >= spec.target_count) {
            hi = mid;
            c_hi = c_mid;
        } else {
            lo = mid;
            c_lo = c_mid;
        }
    }

    if (c_hi == spec.target_count)
        return result_at(hi, c_hi);

    // the count jumps from c_lo past the target to c_hi; pick the closer
    // side, tie toward the tighter t
    CalibrationResult r;
    if (spec.target_count - c_lo <= c_hi - spec.target_count)
        r = result_at(lo, c_lo);
    else
        r = result_at(hi, c_hi);
    r.count_below = c_lo;
    r.count_above = c_hi;
    return r;
}

std::vector<std::pair<double, int>> count_curve(const PassageDatabase& db, const Passage& gold,
                                                const CalibrationSpec& spec, int points,
                                                int workers) {
    if (points < 2)
        throw Error("count_curve needs at least 2 points");
    validate(spec);
    ParamBounds bounds = spec.bounds;
    if (spec.base_params)
        bounds.tight = *spec.base_params;
    std::vector<std::pair<double, int>> curve;
    curve.reserve(points);
    int prev = -1;
    for (int i = 0; i < points; ++i) {
        double t = static_cast<double>(i) / static_cast<double>(points - 1);
        FilterParams params = params_at(bounds, t);
        int count = static_cast<int>(run_pipeline(db, gold, params, workers).candidates.size());
        if (count < prev)
            throw Error("relaxation curve is not monotone");
        prev = count;
        curve.emplace_back(t, count);
    }
    return curve;
}

} // namespace sieve
