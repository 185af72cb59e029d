#include "sieve/embedding.hpp"

#include "sieve/error.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <random>

using namespace sieve;

namespace {

EmbeddingVector vec(std::vector<double> values, std::string id = "test") {
    return EmbeddingVector{std::move(values), std::move(id)};
}

// independent FNV-1a fold for the hand-computed oracle
std::uint64_t ref_fnv(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace

TEST_CASE("cosine_similarity analytic values") {
    CHECK(cosine_similarity(vec({1, 0, 0}), vec({1, 0, 0})) == 1.0);
    CHECK(cosine_similarity(vec({1, 0, 0}), vec({0, 1, 0})) == 0.0);
    double inv = 1.0 / std::sqrt(2.0);
    CHECK(cosine_similarity(vec({1, 0}), vec({inv, inv})) ==
          doctest::Approx(0.70710678).epsilon(1e-8));
    CHECK(cosine_similarity(vec({1, 0}), vec({-1, 0})) == -1.0);
}

TEST_CASE("cosine_similarity identical arrays are exactly 1") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int iter = 0; iter < 20; ++iter) {
        std::vector<double> v(17);
        for (double& x : v)
            x = dist(rng);
        EmbeddingVector a = vec(v), b = vec(v);
        CHECK(cosine_similarity(a, b) == 1.0);
    }
}

TEST_CASE("cosine_similarity error paths") {
    CHECK_THROWS_WITH_AS(cosine_similarity(vec({1, 0}), vec({1, 0, 0})),
                         doctest::Contains("dimension"), Error);
    CHECK_THROWS_WITH_AS(cosine_similarity(vec({1, 0}, "x"), vec({1, 0}, "y")),
                         doctest::Contains("encoder"), Error);
    CHECK_THROWS_WITH_AS(cosine_similarity(vec({0, 0}), vec({1, 0})),
                         doctest::Contains("zero"), Error);
}

TEST_CASE("cosine_similarity symmetry, clamping and scale invariance") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::uniform_real_distribution<double> scale(0.01, 100.0);
    for (int iter = 0; iter < 200; ++iter) {
        std::vector<double> a(8), b(8);
        for (double& x : a)
            x = dist(rng);
        for (double& x : b)
            x = dist(rng);
        EmbeddingVector va = vec(a), vb = vec(b);
        double s1 = cosine_similarity(va, vb);
        double s2 = cosine_similarity(vb, va);
        CHECK(s1 == s2);
        CHECK(std::fabs(s1) <= 1.0);
        std::vector<double> ak = a;
        double k = scale(rng);
        for (double& x : ak)
            x *= k;
        CHECK(cosine_similarity(vec(ak), vb) == doctest::Approx(s1).epsilon(1e-9));
    }
}

TEST_CASE("encode_builtin determinism and unit norm") {
    BuiltinEncoder enc(384);
    CHECK(enc.id() == "builtin:fnv1a:384");
    EmbeddingVector a = enc.encode("The cat sat on the mat.");
    EmbeddingVector b = enc.encode("The cat sat on the mat.");
    CHECK(a.values == b.values); // bit-identical
    CHECK(cosine_similarity(a, b) == 1.0);
    double norm = 0.0;
    for (double x : a.values)
        norm += x * x;
    CHECK(std::sqrt(norm) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("encode_builtin rejects token-less text") {
    BuiltinEncoder enc(8);
    CHECK_THROWS_AS(enc.encode("... !!"), Error);
    CHECK_THROWS_AS(enc.encode(""), Error);
}

TEST_CASE("encode_builtin matches a hand computation at dim 3") {
    // oracle: place each token by the documented hash scheme
    auto bucket = [](const std::string& tok) { return ref_fnv(tok) % 3; };
    auto sign = [](const std::string& tok) {
        return (ref_fnv(tok + std::string(1, '\x01')) & 1) ? 1.0 : -1.0;
    };
    auto expected = [&](const std::vector<std::string>& tokens) {
        std::vector<double> v(3, 0.0);
        for (const auto& t : tokens)
            v[bucket(t)] += sign(t);
        double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
        for (double& x : v)
            x /= n;
        return v;
    };

    BuiltinEncoder enc(3);
    EmbeddingVector a = enc.encode("the cat");
    CHECK(a.values == expected({"the", "cat"}));
    EmbeddingVector b = enc.encode("the cat sat");
    CHECK(b.values == expected({"the", "cat", "sat"}));
    // tokens are lowercased before hashing
    CHECK(enc.encode("The CAT").values == expected({"the", "cat"}));
    double sim = cosine_similarity(a, b);
    double dot = 0.0;
    auto ea = expected({"the", "cat"});
    auto eb = expected({"the", "cat", "sat"});
    for (int i = 0; i < 3; ++i)
        dot += ea[i] * eb[i];
    CHECK(sim == doctest::Approx(dot).epsilon(1e-12));
}

TEST_CASE("disjoint vocabularies with distinct buckets are orthogonal") {
    // at a large dimension these single tokens land in different buckets
    BuiltinEncoder enc(384);
    auto a = enc.encode("alpha");
    auto b = enc.encode("bravo");
    REQUIRE(ref_fnv("alpha") % 384 != ref_fnv("bravo") % 384);
    CHECK(cosine_similarity(a, b) == 0.0);
}
