#include "sieve/embedding.hpp"

#include "sieve/error.hpp"
#include "sieve/hash.hpp"
#include "sieve/segment.hpp"
#include "sieve/text.hpp"

#include <cmath>

namespace sieve {

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dim() != b.dim())
        throw Error("embedding dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                    std::to_string(b.dim()));
    if (a.encoder_id != b.encoder_id)
        throw Error("encoder mismatch: '" + a.encoder_id + "' vs '" + b.encoder_id + "'");
    if (a.empty())
        throw Error("cosine similarity of empty vectors");
    if (a.values == b.values)
        return 1.0;
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        dot += a.values[i] * b.values[i];
        na += a.values[i] * a.values[i];
        nb += b.values[i] * b.values[i];
    }
    if (na == 0.0 || nb == 0.0)
        throw Error("cosine similarity of a zero vector");
    double sim = dot / (std::sqrt(na) * std::sqrt(nb));
    if (sim > 1.0)
        return 1.0;
    if (sim < -1.0)
        return -1.0;
    return sim;
}

BuiltinEncoder::BuiltinEncoder(std::size_t dim) : dim_(dim) {
    if (dim_ == 0)
        throw Error("encoder dimension must be positive");
    id_ = "builtin:fnv1a:" + std::to_string(dim_);
}

EmbeddingVector BuiltinEncoder::encode(std::string_view text) const {
    std::vector<std::string> tokens = tokenize_words(text);
    if (tokens.empty())
        throw Error("cannot encode text with zero word tokens");
    std::vector<double> v(dim_, 0.0);
    for (const auto& raw : tokens) {
        std::string token = ascii_lower(raw);
        std::uint64_t bucket_hash = fnv1a64(token);
        std::uint64_t sign_hash = fnv1a64("\x01", fnv1a64(token));
        double sign = (sign_hash & 1u) ? 1.0 : -1.0;
        v[bucket_hash % dim_] += sign;
    }
    double norm_sq = 0.0;
    for (double x : v)
        norm_sq += x * x;
    if (norm_sq == 0.0)
        throw Error("text hashed to the zero vector (all buckets cancelled)");
    double norm = std::sqrt(norm_sq);
    for (double& x : v)
        x /= norm;
    return EmbeddingVector{std::move(v), id_};
}

std::size_t BuiltinEncoder::parse_dim(std::string_view encoder_id) {
    constexpr std::string_view prefix = "builtin:fnv1a:";
    if (encoder_id.substr(0, prefix.size()) != prefix)
        return 0;
    std::size_t dim = 0;
    for (char c : encoder_id.substr(prefix.size())) {
        if (c < '0' || c > '9')
            return 0;
        dim = dim * 10 + static_cast<std::size_t>(c - '0');
    }
    return dim;
}

} // namespace sieve
