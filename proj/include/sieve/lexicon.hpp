#ifndef SIEVE_LEXICON_HPP
#define SIEVE_LEXICON_HPP

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sieve {

// Six difficulty levels, a total order. Each level covers a school grade
// range: A grades 1-4, B 5-8, C 8-9, D 9-11, E 11-12, F college.
enum class Level : int { A = 0, B = 1, C = 2, D = 3, E = 4, F = 5 };

const char* level_name(Level level);        // "A".."F"
const char* level_grade_range(Level level); // e.g. "grades 9-11"
std::optional<Level> parse_level(std::string_view letter);

class Lexicon {
public:
    // TSV rows "word<TAB>level-letter". Words are folded to lowercase.
    // Consistent duplicates are tolerated; a conflicting duplicate, a
    // missing tab or an unknown level letter raise an Error naming the
    // line. The lexicon id is a content hash over the sorted entries, so
    // logically identical files share an id regardless of row order.
    static Lexicon load(const std::string& path);

    static Lexicon from_entries(const std::vector<std::pair<std::string, Level>>& entries);

    std::optional<Level> word_level(std::string_view token) const;

    const std::string& id() const { return id_; }
    std::size_t size() const { return entries_.size(); }

private:
    std::map<std::string, Level> entries_;
    std::string id_;

    void compute_id();
};

struct DifficultyOptions {
    // Level C straddles the grade-9 boundary; by default only D/E/F count
    // as difficult, this switch adds C.
    bool include_level_c = false;
};

struct DifficultyFeatures {
    int h_diff = 0;   // highest known level, 0 when nothing is known
    double hpw = 0.0; // difficult tokens per token
    int n_diff = 0;   // difficult token count
};

// Unknown tokens never raise h_diff and are not difficult, but they do
// count in the hpw denominator. Throws on an empty token list.
DifficultyFeatures difficulty_features(const Lexicon& lexicon,
                                       const std::vector<std::string>& tokens,
                                       const DifficultyOptions& opts = {});

} // namespace sieve

#endif // SIEVE_LEXICON_HPP
