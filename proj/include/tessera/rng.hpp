#pragma once

#include <cstdint>

namespace tessera {

/// Counter-based pseudo-random stream. Every draw is a pure function of
/// (seed, stream, counter), so substreams can be split per step or per
/// worker and a resumed run replays identical values.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : seed_(seed), stream_(stream) {}

    /// Uniform in the open interval (0,1).
    double uniform(std::uint64_t counter) const;

    /// Standard normal via the inverse distribution function.
    double normal(std::uint64_t counter) const;

    std::uint64_t bits(std::uint64_t counter) const;

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
};

std::uint64_t splitmix64(std::uint64_t x);

} // namespace tessera
