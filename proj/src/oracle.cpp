#include "tessera/oracle.hpp"

#include "tessera/gauss.hpp"
#include "tessera/rng.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

namespace tessera::oracle {

namespace {

struct ChunkSums {
    double w = 0.0;   // sum of weighted indicators
    double w2 = 0.0;  // sum of squared weighted indicators
};

// Deterministic chunked accumulation: sample k is a pure function of
// (seed, k), chunks are merged in index order regardless of thread count.
Result run_weighted(const BinaryLsf& lsf, const transforms::ProbabilitySpace& space,
                    std::uint64_t n, double scale, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("oracle: n must be >= 1");
    if (scale < 1.0) throw std::invalid_argument("oracle: scale must be >= 1");
    const int nvar = space.nvar();
    const double log_scale_term = nvar * std::log(scale);
    const double var_term = 0.5 * (1.0 - 1.0 / (scale * scale));
    const CounterRng rng(seed, 0);

    const std::uint64_t chunk = 1 << 14;
    const std::uint64_t nchunks = (n + chunk - 1) / chunk;
    std::vector<ChunkSums> sums(nchunks);

    auto worker = [&](std::uint64_t c0, std::uint64_t c1) {
        Vector u(nvar);
        for (std::uint64_t c = c0; c < c1; ++c) {
            ChunkSums acc;
            const std::uint64_t lo = c * chunk;
            const std::uint64_t hi = std::min(n, lo + chunk);
            for (std::uint64_t k = lo; k < hi; ++k) {
                for (int v = 0; v < nvar; ++v)
                    u(v) = scale * rng.normal(k * static_cast<std::uint64_t>(nvar) + v);
                bool fail = lsf(space.from_G(u));
                if (fail) {
                    double w = (scale == 1.0)
                                   ? 1.0
                                   : std::exp(log_scale_term - var_term * u.squaredNorm());
                    acc.w += w;
                    acc.w2 += w * w;
                }
            }
            sums[c] = acc;
        }
    };

    unsigned hw = std::thread::hardware_concurrency();
    unsigned nthreads = std::min<std::uint64_t>(std::max(1u, hw), nchunks);
    if (nthreads <= 1 || n < (1u << 16)) {
        worker(0, nchunks);
    } else {
        std::vector<std::thread> pool;
        std::uint64_t per = (nchunks + nthreads - 1) / nthreads;
        for (unsigned t = 0; t < nthreads; ++t) {
            std::uint64_t c0 = t * per, c1 = std::min<std::uint64_t>(nchunks, c0 + per);
            if (c0 >= c1) break;
            pool.emplace_back(worker, c0, c1);
        }
        for (auto& th : pool) th.join();
    }

    double sw = 0.0, sw2 = 0.0;
    for (const auto& s : sums) {
        sw += s.w;
        sw2 += s.w2;
    }
    Result res;
    res.n = n;
    res.seed = seed;
    res.estimate = sw / static_cast<double>(n);
    double mean2 = sw2 / static_cast<double>(n);
    double var = std::max(0.0, mean2 - res.estimate * res.estimate);
    res.std_error = std::sqrt(var / static_cast<double>(n));
    return res;
}

} // namespace

Result mc_pf(const BinaryLsf& lsf, const transforms::ProbabilitySpace& space, std::uint64_t n,
             std::uint64_t seed) {
    return run_weighted(lsf, space, n, 1.0, seed);
}

Result is_pf(const BinaryLsf& lsf, const transforms::ProbabilitySpace& space, std::uint64_t n,
             double scale, std::uint64_t seed) {
    return run_weighted(lsf, space, n, scale, seed);
}

} // namespace tessera::oracle
