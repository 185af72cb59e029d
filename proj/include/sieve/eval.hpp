#ifndef SIEVE_EVAL_HPP
#define SIEVE_EVAL_HPP

#include "sieve/filter.hpp"
#include "sieve/passage.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sieve {

// The question shown to raters, verbatim on every exported packet.
extern const char* const kRaterQuestion;

enum class Origin { filtered, dummy };

struct TrialEntry {
    std::string anon_label; // "1".."2k" in presentation order
    std::string passage_id;
    Origin origin; // withheld from the rater-facing export
};

struct TrialSheet {
    std::string gold_id;
    std::string gold_text;
    std::uint64_t shuffle_seed = 0;
    int target_count = 5;
    std::vector<TrialEntry> entries;
};

struct TrialOptions {
    int target_count = 5;
    bool sort_by_sim = false; // pick top-similarity candidates instead of database order
    int workers = 1;
};

// Runs the pipeline, takes the first target_count candidates (or the most
// similar ones under sort_by_sim), draws as many dummies uniformly without
// replacement from the rest of the database, shuffles the union and labels
// it "1".."2k". All randomness comes from DetRng(seed), so a seed fixes
// the sheet bit-for-bit. Errors when the pipeline yields too few
// candidates (calibrate first) or the database is too small.
TrialSheet make_trial(const PassageDatabase& db, const Passage& gold,
                      const FilterParams& params, std::uint64_t seed,
                      const TrialOptions& opts = {});

struct ScoreSheet {
    std::string rater_id;
    std::string gold_id;
    std::map<std::string, int> scores; // anon_label -> 1..5
    std::map<std::string, std::string> reasons;
};

// Pearson product-moment correlation, clamped to [-1, 1]. Computed with
// Welford-style running co-moments. Throws on fewer than two points,
// length mismatch, or constant input ("undefined correlation").
double pearson(const std::vector<double>& x, const std::vector<double>& y);

extern const std::vector<std::string> kNumericFeatures; // n_sent, n_word, ...

// Per numeric feature: r between the trial candidates' feature values and
// their summed suitability scores. Constant inputs are reported as
// nullopt (not computable) rather than an error.
std::map<std::string, std::optional<double>>
feature_correlations(const TrialSheet& trial, const std::vector<ScoreSheet>& sheets,
                     const PassageDatabase& db);

struct GoldResult {
    std::string gold_id;
    int dummy_sum = 0;
    int filtered_sum = 0;
    int delta = 0; // filtered_sum - dummy_sum
    std::map<std::string, std::optional<double>> feature_r;
};

struct TrialReport {
    std::vector<GoldResult> per_gold;
    double avg_dummy = 0.0;
    double avg_filtered = 0.0;
    double avg_delta = 0.0;
    // column means over the computable per-gold correlations
    std::map<std::string, std::optional<double>> avg_r;
    // correlations over all golds' candidates pooled into one sample
    std::map<std::string, std::optional<double>> pooled_r;
};

// Score sums and deltas only; correlations stay empty. Every trial must be
// covered by at least one sheet, every sheet must score every label of its
// trial exactly once, scores must be 1..5.
TrialReport aggregate_scores(const std::vector<TrialSheet>& trials,
                             const std::vector<ScoreSheet>& sheets);

// aggregate_scores plus per-gold, averaged and pooled correlations.
TrialReport build_report(const std::vector<TrialSheet>& trials,
                         const std::vector<ScoreSheet>& sheets, const PassageDatabase& db);

std::string format_report(const TrialReport& report);
std::string report_to_json(const TrialReport& report);

// Rater-facing packet: CSV columns gold_text, anon_label, candidate_text,
// score, reason, preceded by "# gold:", "# rater:" (left blank for the
// rater) and "# question:" comment lines. Origins are never written.
void export_trial(const TrialSheet& trial, const PassageDatabase& db, const std::string& path);

// Parses filled packets; a "# gold:" line starts a new sheet, so one file
// may carry several. Out-of-range or missing scores, unknown labels and a
// blank rater line are errors naming the row.
std::vector<ScoreSheet> import_scores(const std::string& path);

// Researcher-side persistence, origins included.
void save_trial(const TrialSheet& trial, const std::string& path);
TrialSheet load_trial(const std::string& path);

} // namespace sieve

#endif // SIEVE_EVAL_HPP
