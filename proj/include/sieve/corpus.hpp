#ifndef SIEVE_CORPUS_HPP
#define SIEVE_CORPUS_HPP

#include "sieve/lexicon.hpp"
#include "sieve/passage.hpp"
#include "sieve/segment.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace sieve {

// Preprocessing thresholds, counted in code points of the normalized text.
constexpr std::size_t kMinSentenceChars = 10;
constexpr std::size_t kMinPassageChars = 30;

std::vector<std::string> drop_short_sentences(const std::vector<std::string>& sentences);
std::vector<std::string> drop_short_passages(const std::vector<std::string>& passages);

struct ReferenceScan {
    bool found = false;
    std::vector<std::string> matches; // first-appearance order, deduplicated
};

// Case-sensitive whole-word scan for external-reference markers.
ReferenceScan detect_external_refs(std::string_view text,
                                   const std::vector<std::string>& markers = {"Table",
                                                                              "Figure"});

struct RawDocument {
    std::string source;
    std::string text; // paragraphs separated by blank lines
};

struct IngestOptions {
    SegmentOptions segment;
    bool exclude_external_refs = false;
    std::vector<std::string> ref_markers = {"Table", "Figure"};
};

struct IngestStats {
    int documents = 0;
    int paragraphs = 0;
    int sentences_seen = 0;
    int sentences_dropped = 0;
    int passages_dropped_short = 0;
    int passages_dropped_refs = 0;
    int duplicates_dropped = 0;
    int passages_kept = 0;
};

// Per paragraph: normalize whitespace, segment into sentences, drop
// sentences under 10 chars, reassemble with single spaces, drop passages
// under 30 chars. Ids are content-hash derived, so re-ingesting the same
// input reproduces the same ids and exact duplicate texts collapse to one
// passage.
PassageDatabase ingest(const std::vector<RawDocument>& documents,
                       const IngestOptions& opts = {}, IngestStats* stats = nullptr);

// The full preprocessing path for a single passage (used for gold inputs).
// Returns the empty string when nothing survives.
std::string preprocess_passage(std::string_view raw, const SegmentOptions& opts = {});

struct ExtractOptions {
    SegmentOptions segment;
    DifficultyOptions difficulty;
    int workers = 1;
};

// Attaches a complete FeatureVector to every passage and records the
// lexicon/encoder ids. Per-passage work is pure, so it partitions across
// workers with results merged in database order.
void extract_all(PassageDatabase& db, const Lexicon& lexicon, const Encoder& encoder,
                 const ExtractOptions& opts = {});

FeatureVector extract_features(std::string_view text, const Lexicon& lexicon,
                               const Encoder& encoder, const SegmentOptions& seg = {},
                               const DifficultyOptions& diff = {});

// One row of the statistics grid. Quartiles use linear interpolation
// between closest ranks (the inclusive method).
struct StatRow {
    long long total = 0;
    double mean = 0.0;
    double q4 = 0.0; // max
    double q3 = 0.0;
    double q2 = 0.0; // median
    double q1 = 0.0;
    double q0 = 0.0; // min
};

struct CorpusStats {
    long long n_instances = 0;
    StatRow sent;
    StatRow word;
    StatRow chars;
    StatRow diff;
};

CorpusStats compute_stats(const PassageDatabase& db); // throws on empty database

// The printed grid: properties across, total/mean/Q4..min down.
std::string format_stats_grid(const CorpusStats& stats);

// JSONL. Line 1 is a header {"format_version":1,"lexicon_id":...,
// "encoder_id":...}; every further line is one passage. Loading what was
// saved reproduces the database value exactly.
constexpr int kDatabaseFormatVersion = 1;
void save_database(const PassageDatabase& db, const std::string& path);
PassageDatabase load_database(const std::string& path);

// Attaches externally computed vectors (JSONL of {"id":...,"vector":[...]})
// to an extracted database; encoder_id becomes "external:<file hash>".
// Missing ids, duplicate ids and ragged dimensions are collected into one
// error listing the offenders.
void import_embeddings(PassageDatabase& db, const std::string& path);

} // namespace sieve

#endif // SIEVE_CORPUS_HPP
