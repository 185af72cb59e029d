#include "sieve/rng.hpp"

#include <limits>

namespace sieve {

std::uint64_t DetRng::bounded(std::uint64_t n) {
    if (n == 0)
        return 0;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() / n * n;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % n;
}

} // namespace sieve
