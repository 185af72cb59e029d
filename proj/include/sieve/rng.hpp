#ifndef SIEVE_RNG_HPP
#define SIEVE_RNG_HPP

#include <cstdint>
#include <random>
#include <vector>

namespace sieve {

// The documented generator behind every seeded operation. mt19937_64 has a
// fully specified output sequence, and the helpers below avoid the
// standard distributions (whose output is implementation-defined), so a
// seed reproduces the same draws on every platform.
class DetRng {
public:
    explicit DetRng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Unbiased draw from [0, n): draw 64-bit words, reject those above the
    // largest multiple of n, reduce modulo n.
    std::uint64_t bounded(std::uint64_t n);

    // Fisher-Yates, iterating i = n-1 .. 1 with j = bounded(i+1).
    template <typename T> void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(bounded(i));
            std::swap(items[i - 1], items[j]);
        }
    }

    // Partial Fisher-Yates from the front: k draws, each swapping the
    // chosen remaining element into position.
    template <typename T> std::vector<T> sample(std::vector<T> pool, std::size_t k) {
        if (k > pool.size())
            k = pool.size();
        for (std::size_t i = 0; i < k; ++i) {
            std::size_t j = i + static_cast<std::size_t>(bounded(pool.size() - i));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(k);
        return pool;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace sieve

#endif // SIEVE_RNG_HPP
