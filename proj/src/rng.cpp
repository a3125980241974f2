#include "tessera/rng.hpp"

#include "tessera/gauss.hpp"

namespace tessera {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t CounterRng::bits(std::uint64_t counter) const {
    std::uint64_t h = splitmix64(seed_ ^ 0x6A09E667F3BCC909ull);
    h = splitmix64(h ^ stream_ * 0xD1B54A32D192ED03ull);
    return splitmix64(h ^ counter * 0x2545F4914F6CDD1Dull);
}

double CounterRng::uniform(std::uint64_t counter) const {
    // 53 significant bits, shifted to the cell centre so 0 and 1 never occur.
    return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t counter) const {
    return gauss::inv_std_normal_cdf(uniform(counter));
}

} // namespace tessera
