#ifndef SIEVE_EMBEDDING_HPP
#define SIEVE_EMBEDDING_HPP

#include <string>
#include <string_view>
#include <vector>

namespace sieve {

struct EmbeddingVector {
    std::vector<double> values;
    std::string encoder_id;

    std::size_t dim() const { return values.size(); }
    bool empty() const { return values.empty(); }

    bool operator==(const EmbeddingVector&) const = default;
};

// dot(a,b) / (|a||b|), accumulated index-ascending in doubles, clamped to
// [-1, 1]. Identical value arrays return exactly 1.0 so that an exact
// duplicate always passes a `similarity >= 1` threshold. Throws on
// dimension or encoder mismatch and on zero vectors.
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

class Encoder {
public:
    virtual ~Encoder() = default;
    virtual const std::string& id() const = 0;
    virtual EmbeddingVector encode(std::string_view text) const = 0;
};

// Hashed bag of words. Every lowercased word token of the text is placed
// in bucket fnv1a64(token) % dim with sign -1/+1 taken from bit 0 of
// fnv1a64(token + 0x01); bucket counts are accumulated and the vector is
// L2-normalized. Fully determined by the token stream, so byte-identical
// texts produce bit-identical vectors on every platform.
class BuiltinEncoder : public Encoder {
public:
    static constexpr std::size_t kDefaultDim = 384;

    explicit BuiltinEncoder(std::size_t dim = kDefaultDim);

    const std::string& id() const override { return id_; }
    std::size_t dim() const { return dim_; }
    EmbeddingVector encode(std::string_view text) const override;

    // "builtin:fnv1a:<dim>" -> encoder, nullopt for foreign ids
    static std::size_t parse_dim(std::string_view encoder_id); // 0 when not builtin

private:
    std::size_t dim_;
    std::string id_;
};

} // namespace sieve

#endif // SIEVE_EMBEDDING_HPP
