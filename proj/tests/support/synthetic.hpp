#ifndef SIEVE_TESTS_SYNTHETIC_HPP
#define SIEVE_TESTS_SYNTHETIC_HPP

// Synthetic databases with features spanning realistic corpus ranges
// (sentences 1-37, words 7-431, characters 42-2802, difficult words 0-70),
// plus random unit embeddings. Used by the property suites; the texts are
// placeholders since only the features matter to the filters.

#include "sieve/filter.hpp"
#include "sieve/passage.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace sieve::testing {

inline EmbeddingVector random_unit_vector(std::mt19937_64& rng, std::size_t dim,
                                          const std::string& encoder_id) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> v(dim);
    double norm_sq = 0.0;
    for (double& x : v) {
        x = gauss(rng);
        norm_sq += x * x;
    }
    double norm = std::sqrt(norm_sq);
    for (double& x : v)
        x /= norm;
    return EmbeddingVector{std::move(v), encoder_id};
}

inline FeatureVector random_features(std::mt19937_64& rng, std::size_t dim = 16,
                                     const std::string& encoder_id = "synthetic") {
    FeatureVector f;
    f.n_sent = 1 + static_cast<int>(rng() % 37);
    f.n_word = 7 + static_cast<int>(rng() % 425);
    f.n_char = 42 + static_cast<int>(rng() % 2761);
    f.wps = static_cast<double>(f.n_word) / f.n_sent;
    f.h_diff = static_cast<int>(rng() % 6);
    f.n_diff = static_cast<int>(rng() % 71);
    if (f.n_diff > f.n_word)
        f.n_diff = f.n_word;
    f.hpw = static_cast<double>(f.n_diff) / f.n_word;
    f.embedding = random_unit_vector(rng, dim, encoder_id);
    return f;
}

inline PassageDatabase random_database(std::mt19937_64& rng, std::size_t n_passages,
                                       std::size_t dim = 16) {
    PassageDatabase db;
    db.lexicon_id = "lex:synthetic";
    db.encoder_id = "synthetic";
    for (std::size_t i = 0; i < n_passages; ++i) {
        Passage p;
        p.id = "p" + std::to_string(i);
        p.text = "synthetic passage " + std::to_string(i);
        p.source = "synthetic";
        p.features = random_features(rng, dim);
        db.passages.push_back(std::move(p));
    }
    return db;
}

inline Passage random_gold(std::mt19937_64& rng, std::size_t dim = 16) {
    Passage gold;
    gold.id = "gold";
    gold.text = "synthetic gold";
    gold.source = "synthetic";
    gold.features = random_features(rng, dim);
    return gold;
}

inline FilterParams random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    FilterParams p;
    p.alpha_sent = static_cast<int>(rng() % 40);
    p.alpha_wps = unit(rng) * 25.0;
    p.alpha_hdiff = static_cast<int>(rng() % 6);
    p.alpha_hpw = unit(rng);
    p.min_sem_sim = -1.0 + 2.0 * unit(rng);
    return p;
}

} // namespace sieve::testing

#endif // SIEVE_TESTS_SYNTHETIC_HPP
