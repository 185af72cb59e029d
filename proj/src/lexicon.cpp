#include "sieve/lexicon.hpp"

#include "sieve/error.hpp"
#include "sieve/hash.hpp"
#include "sieve/text.hpp"

#include <fstream>

namespace sieve {

const char* level_name(Level level) {
    static const char* names[] = {"A", "B", "C", "D", "E", "F"};
    return names[static_cast<int>(level)];
}

const char* level_grade_range(Level level) {
    static const char* ranges[] = {"grades 1-4", "grades 5-8",  "grades 8-9",
                                   "grades 9-11", "grades 11-12", "college"};
    return ranges[static_cast<int>(level)];
}

std::optional<Level> parse_level(std::string_view letter) {
    if (letter.size() != 1)
        return std::nullopt;
    char c = letter[0];
    if (c < 'A' || c > 'F')
        return std::nullopt;
    return static_cast<Level>(c - 'A');
}

Lexicon Lexicon::load(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open lexicon: " + path);
    Lexicon lex;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos)
            throw Error(path + ":" + std::to_string(line_no) + ": missing tab separator");
        std::string word = ascii_lower(line.substr(0, tab));
        std::string letter = line.substr(tab + 1);
        if (word.empty())
            throw Error(path + ":" + std::to_string(line_no) + ": empty word");
        for (char c : word)
            if (is_space(c))
                throw Error(path + ":" + std::to_string(line_no) + ": word contains whitespace");
        auto level = parse_level(letter);
        if (!level)
            throw Error(path + ":" + std::to_string(line_no) + ": invalid level '" + letter +
                        "' (expected A-F)");
        auto [it, inserted] = lex.entries_.emplace(word, *level);
        if (!inserted && it->second != *level)
            throw Error(path + ":" + std::to_string(line_no) + ": conflicting level for '" +
                        word + "'");
    }
    lex.compute_id();
    return lex;
}

Lexicon Lexicon::from_entries(const std::vector<std::pair<std::string, Level>>& entries) {
    Lexicon lex;
    for (const auto& [word, level] : entries) {
        auto [it, inserted] = lex.entries_.emplace(ascii_lower(word), level);
        if (!inserted && it->second != level)
            throw Error("conflicting level for '" + word + "'");
    }
    lex.compute_id();
    return lex;
}

void Lexicon::compute_id() {
    // entries_ is an ordered map, so this hash is row-order independent
    std::uint64_t h = kFnvOffset;
    for (const auto& [word, level] : entries_) {
        h = fnv1a64(word, h);
        h = fnv1a64("\t", h);
        h = fnv1a64(level_name(level), h);
        h = fnv1a64("\n", h);
    }
    id_ = "lex:" + hex64(h);
}

std::optional<Level> Lexicon::word_level(std::string_view token) const {
    auto it = entries_.find(ascii_lower(token));
    if (it == entries_.end())
        return std::nullopt;
    return it->second;
}

DifficultyFeatures difficulty_features(const Lexicon& lexicon,
                                       const std::vector<std::string>& tokens,
                                       const DifficultyOptions& opts) {
    if (tokens.empty())
        throw Error("difficulty features need at least one token");
    const Level threshold = opts.include_level_c ? Level::C : Level::D;
    DifficultyFeatures f;
    for (const auto& token : tokens) {
        auto level = lexicon.word_level(token);
        if (!level)
            continue;
        f.h_diff = std::max(f.h_diff, static_cast<int>(*level));
        if (*level >= threshold)
            ++f.n_diff;
    }
    f.hpw = static_cast<double>(f.n_diff) / static_cast<double>(tokens.size());
    return f;
}

} // namespace sieve
