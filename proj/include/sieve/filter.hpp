#ifndef SIEVE_FILTER_HPP
#define SIEVE_FILTER_HPP

#include "sieve/passage.hpp"

#include <string>
#include <vector>

namespace sieve {

// The range parameters of one search. Every bound is inclusive and the
// comparisons are exact: there is no hidden epsilon.
struct FilterParams {
    int alpha_sent = 0;
    double alpha_wps = 0.0;
    int alpha_hdiff = 0;
    double alpha_hpw = 0.0;
    double min_sem_sim = 1.0;

    bool operator==(const FilterParams&) const = default;
};

// {"alpha_sent":int,"alpha_wps":float,"alpha_hdiff":int,"alpha_hpw":float,
// "min_sem_sim":float}; unknown keys, missing keys and out-of-range values
// are errors.
FilterParams load_filter_params(const std::string& path);
FilterParams filter_params_from_json_text(const std::string& text, const std::string& origin);
std::string filter_params_to_json(const FilterParams& params);
void validate(const FilterParams& params); // throws on out-of-range values

// The five pass conditions. `gold` is the query passage, `db_inst` the
// database passage under test.
bool condition_sent(const FeatureVector& gold, const FeatureVector& db_inst, int alpha);
bool condition_wps(const FeatureVector& gold, const FeatureVector& db_inst, double alpha);
bool condition_hdiff(const FeatureVector& gold, const FeatureVector& db_inst, int alpha);
bool condition_hpw(const FeatureVector& gold, const FeatureVector& db_inst, double alpha);
bool condition_semsim(const FeatureVector& gold, const FeatureVector& db_inst, double min_sim);

constexpr int kNumConditions = 5;
extern const char* const kConditionNames[kNumConditions]; // pipeline order

struct StageCount {
    std::string name;
    std::size_t input = 0;
    std::size_t output = 0;
};

struct FilterTrace {
    std::vector<StageCount> stages; // counts are non-increasing down the list
    std::vector<std::string> candidate_ids;
};

struct PipelineResult {
    std::vector<Passage> candidates; // database order
    FilterTrace trace;
};

// Applies the conditions in sequence (sent, wps, h_diff, hpw, sem_sim) to
// every passage except the gold itself. Membership is a pure conjunction,
// so passages partition across workers; the merge preserves database order
// and the result is identical for any worker count.
PipelineResult run_pipeline(const PassageDatabase& db, const Passage& gold,
                            const FilterParams& params, int workers = 1);

} // namespace sieve

#endif // SIEVE_FILTER_HPP
