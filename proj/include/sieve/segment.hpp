#ifndef SIEVE_SEGMENT_HPP
#define SIEVE_SEGMENT_HPP

#include <string>
#include <string_view>
#include <vector>

namespace sieve {

// Rule-based sentence splitting and word tokenization. The rules are
// deterministic so counts reproduce bit-for-bit without a model dependency.
struct SegmentOptions {
    // A trailing period after one of these does not end a sentence.
    // Matched case-insensitively against the word before the period.
    std::vector<std::string> abbreviations = {"Mr", "Mrs", "Dr", "etc", "e.g", "i.e", "vs"};
};

// One abbreviation per line; blank lines ignored.
SegmentOptions load_abbreviations(const std::string& path);

// Sentences are maximal spans ending at '.', '!' or '?' (runs of
// terminators stay together) or at end of text. A terminator followed by
// closing quotes/brackets keeps them with the sentence. A period preceded
// by a single capital letter or a listed abbreviation does not terminate.
// Boundaries are only taken where a space (or end of text) follows, so
// joining the result with single spaces reproduces the input.
std::vector<std::string> split_sentences(std::string_view text,
                                         const SegmentOptions& opts = {});

// Word tokens are maximal runs of letters/digits; apostrophes and hyphens
// are kept when flanked by word characters on both sides. Standalone
// punctuation is never a token.
std::vector<std::string> tokenize_words(std::string_view sentence);

// Sentences plus their word tokens. Joining the sentences with single
// spaces reproduces the normalized input.
struct SegmentedPassage {
    std::vector<std::string> sentences;
    std::vector<std::vector<std::string>> tokens; // per sentence
};

SegmentedPassage segment_passage(std::string_view text, const SegmentOptions& opts = {});

struct SurfaceFeatures {
    int n_sent = 0;
    int n_word = 0;
    int n_char = 0; // code points of the normalized text, whitespace included
    double wps = 0.0;
};

// Throws sieve::Error("no sentences") when the text segments to nothing.
SurfaceFeatures surface_features(std::string_view text, const SegmentOptions& opts = {});

} // namespace sieve

#endif // SIEVE_SEGMENT_HPP
