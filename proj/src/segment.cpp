#include "sieve/segment.hpp"

#include "sieve/error.hpp"
#include "sieve/text.hpp"

#include <fstream>

namespace sieve {

namespace {

bool is_terminator(char c) {
    return c == '.' || c == '!' || c == '?';
}

bool is_ascii_alnum(char32_t cp) {
    return (cp >= '0' && cp <= '9') || (cp >= 'A' && cp <= 'Z') || (cp >= 'a' && cp <= 'z');
}

// Typographic punctuation that must not be swallowed into word tokens even
// though it sits above the ASCII range.
bool is_unicode_punct(char32_t cp) {
    switch (cp) {
    case 0x00A0: // no-break space
    case 0x00AB: // left guillemet
    case 0x00BB: // right guillemet
    case 0x2013: // en dash
    case 0x2014: // em dash
    case 0x2018: // left single quote
    case 0x201C: // left double quote
    case 0x201D: // right double quote
    case 0x2026: // ellipsis
        return true;
    default:
        return false;
    }
}

bool is_word_cp(char32_t cp) {
    if (cp < 0x80)
        return is_ascii_alnum(cp);
    if (cp == 0x2019) // right single quote doubles as apostrophe
        return false;
    return !is_unicode_punct(cp);
}

bool is_apostrophe(char32_t cp) {
    return cp == '\'' || cp == 0x2019;
}

// Byte length of a closing quote/bracket at `i`, 0 if none.
std::size_t closer_len(std::string_view text, std::size_t i) {
    if (i >= text.size())
        return 0;
    char c = text[i];
    if (c == '"' || c == '\'' || c == ')' || c == ']' || c == '}')
        return 1;
    // U+2019 and U+201D
    if (i + 3 <= text.size() && static_cast<unsigned char>(text[i]) == 0xE2 &&
        static_cast<unsigned char>(text[i + 1]) == 0x80) {
        unsigned char b3 = static_cast<unsigned char>(text[i + 2]);
        if (b3 == 0x99 || b3 == 0x9D)
            return 3;
    }
    return 0;
}

bool is_word_byte(char c) {
    unsigned char u = static_cast<unsigned char>(c);
    return is_ascii_alnum(u) || c == '.' || c == '\'' || c == '-' || u >= 0x80;
}

bool equals_ignore_ascii_case(std::string_view a, std::string_view b) {
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        char ca = a[i], cb = b[i];
        if (ca >= 'A' && ca <= 'Z')
            ca = static_cast<char>(ca - 'A' + 'a');
        if (cb >= 'A' && cb <= 'Z')
            cb = static_cast<char>(cb - 'A' + 'a');
        if (ca != cb)
            return false;
    }
    return true;
}

// The word immediately before text[dot]; letters, digits, internal periods,
// apostrophes and hyphens count as part of it.
std::string_view word_before(std::string_view text, std::size_t start, std::size_t dot) {
    std::size_t b = dot;
    while (b > start && is_word_byte(text[b - 1]))
        --b;
    return text.substr(b, dot - b);
}

bool abbreviation_guard(std::string_view text, std::size_t sentence_start, std::size_t dot,
                        const SegmentOptions& opts) {
    std::string_view word = word_before(text, sentence_start, dot);
    if (word.empty())
        return false;
    // single capital letter: an initial such as "J."
    if (word.size() == 1 && word[0] >= 'A' && word[0] <= 'Z')
        return true;
    for (const auto& abbr : opts.abbreviations)
        if (equals_ignore_ascii_case(word, abbr))
            return true;
    return false;
}

} // namespace

SegmentOptions load_abbreviations(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open abbreviation list: " + path);
    SegmentOptions opts;
    opts.abbreviations.clear();
    std::string line;
    while (std::getline(in, line)) {
        std::string entry = normalize_whitespace(line);
        if (!entry.empty())
            opts.abbreviations.push_back(entry);
    }
    return opts;
}

std::vector<std::string> split_sentences(std::string_view text, const SegmentOptions& opts) {
    std::vector<std::string> sentences;
    if (text.empty())
        return sentences;

    std::size_t start = 0;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        if (!is_terminator(text[i])) {
            ++i;
            continue;
        }
        // collect the full terminator run ("?!", "...")
        std::size_t run_end = i;
        while (run_end + 1 < n && is_terminator(text[run_end + 1]))
            ++run_end;
        bool lone_period = run_end == i && text[i] == '.';
        if (lone_period && abbreviation_guard(text, start, i, opts)) {
            ++i;
            continue;
        }
        // attach closing quotes/brackets
        std::size_t end = run_end + 1;
        for (std::size_t len = closer_len(text, end); len != 0; len = closer_len(text, end))
            end += len;
        if (end == n) {
            sentences.emplace_back(text.substr(start));
            start = n;
            break;
        }
        if (text[end] == ' ') {
            sentences.emplace_back(text.substr(start, end - start));
            start = end + 1;
            i = start;
        } else {
            i = end; // mid-token punctuation such as "3.14" — no boundary
        }
    }
    if (start < n)
        sentences.emplace_back(text.substr(start));
    return sentences;
}

std::vector<std::string> tokenize_words(std::string_view sentence) {
    std::vector<std::string> tokens;
    std::size_t pos = 0;
    std::string current;
    bool in_token = false;
    while (pos < sentence.size()) {
        std::size_t cp_start = pos;
        char32_t cp = utf8_next(sentence, pos);
        if (is_word_cp(cp)) {
            current.append(sentence.substr(cp_start, pos - cp_start));
            in_token = true;
            continue;
        }
        bool joiner = in_token && (is_apostrophe(cp) || cp == '-');
        if (joiner && pos < sentence.size()) {
            std::size_t peek = pos;
            if (is_word_cp(utf8_next(sentence, peek))) {
                current.append(sentence.substr(cp_start, pos - cp_start));
                continue;
            }
        }
        if (in_token) {
            tokens.push_back(std::move(current));
            current.clear();
            in_token = false;
        }
    }
    if (in_token)
        tokens.push_back(std::move(current));
    return tokens;
}

SegmentedPassage segment_passage(std::string_view text, const SegmentOptions& opts) {
    SegmentedPassage seg;
    seg.sentences = split_sentences(text, opts);
    seg.tokens.reserve(seg.sentences.size());
    for (const auto& s : seg.sentences)
        seg.tokens.push_back(tokenize_words(s));
    return seg;
}

SurfaceFeatures surface_features(std::string_view text, const SegmentOptions& opts) {
    SegmentedPassage seg = segment_passage(text, opts);
    if (seg.sentences.empty())
        throw Error("no sentences");
    SurfaceFeatures f;
    f.n_sent = static_cast<int>(seg.sentences.size());
    for (const auto& tokens : seg.tokens)
        f.n_word += static_cast<int>(tokens.size());
    f.n_char = static_cast<int>(utf8_length(text));
    f.wps = static_cast<double>(f.n_word) / static_cast<double>(f.n_sent);
    return f;
}

} // namespace sieve
