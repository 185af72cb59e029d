#ifndef SIEVE_HASH_HPP
#define SIEVE_HASH_HPP

#include <cstdint>
#include <string>
#include <string_view>

namespace sieve {

// FNV-1a, 64 bit. This is the project's one public hash: passage ids,
// lexicon ids and the built-in encoder all derive from it, so it must
// stay fixed across platforms and releases.
constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

constexpr std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = kFnvOffset) {
    std::uint64_t h = seed;
    for (unsigned char c : bytes) {
        h ^= static_cast<std::uint64_t>(c);
        h *= kFnvPrime;
    }
    return h;
}

std::string hex64(std::uint64_t value);

} // namespace sieve

#endif // SIEVE_HASH_HPP
