#pragma once

#include "tessera/transforms.hpp"
#include "tessera/types.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tessera::bench {

struct Reference {
    double pf = std::numeric_limits<double>::quiet_NaN();
    std::string provenance;
    std::optional<Vector> t_v2;
};

/// A registered limit-state problem: the g function acts on physical
/// coordinates; failure is g <= 0. The estimator only ever sees the outcome.
struct Benchmark {
    std::string name;
    int nvar = 0;
    transforms::ProbabilitySpace space = transforms::ProbabilitySpace::standard_gaussian(1);
    std::function<double(const Vector&)> g;
    Reference ref;

    std::pair<double, Outcome> evaluate(const Vector& x_physical) const {
        double v = g(x_physical);
        return {v, v <= 0.0 ? Outcome::Failure : Outcome::Safe};
    }
};

/// Instantiates a benchmark by name. The N-dimensional families (g_lin,
/// g_min, g_max, g_int, g_out) require nvar; the fixed problems ignore it.
Benchmark make_benchmark(const std::string& name, int nvar = 0);

std::vector<std::string> benchmark_names();

Reference reference(const std::string& name, int nvar = 0);

/// Limit state evaluated by an external executable speaking a line protocol:
/// coordinates in, one g value (or a 0/1 outcome in binary mode, 1 = failure)
/// out per line.
class ExternalLsf {
public:
    ExternalLsf(std::string command, int nvar, bool binary_only);
    ~ExternalLsf();
    ExternalLsf(const ExternalLsf&) = delete;
    ExternalLsf& operator=(const ExternalLsf&) = delete;

    std::pair<double, Outcome> evaluate(const Vector& x);
    bool binary_only() const { return binary_only_; }

private:
    std::string command_;
    int nvar_;
    bool binary_only_;
    int pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string buffer_;
};

} // namespace tessera::bench
