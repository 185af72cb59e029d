#ifndef SIEVE_PASSAGE_HPP
#define SIEVE_PASSAGE_HPP

#include "sieve/embedding.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sieve {

// Everything the filters compare. wps and hpw are carried unrounded;
// wps * n_sent == n_word and hpw * n_word == n_diff hold as rationals.
struct FeatureVector {
    int n_sent = 0;
    int n_word = 0;
    int n_char = 0;
    double wps = 0.0;
    int h_diff = 0;
    double hpw = 0.0;
    int n_diff = 0;
    EmbeddingVector embedding;

    bool operator==(const FeatureVector&) const = default;
};

struct Passage {
    std::string id;
    std::string text;   // normalized: no double whitespace, >= 30 chars
    std::string source; // free-form provenance
    std::optional<FeatureVector> features;

    bool operator==(const Passage&) const = default;
};

struct PassageDatabase {
    std::vector<Passage> passages;
    std::string lexicon_id; // set once features are extracted
    std::string encoder_id;

    std::size_t size() const { return passages.size(); }
    bool empty() const { return passages.empty(); }
    const Passage* find(std::string_view id) const;

    bool operator==(const PassageDatabase&) const = default;
};

} // namespace sieve

#endif // SIEVE_PASSAGE_HPP
