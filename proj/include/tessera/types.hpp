#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <vector>

namespace tessera {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Binary outcome of a limit-state evaluation. The outcome is authoritative;
/// a stored raw g-value is informational only and never enters the estimator.
enum class Outcome : std::uint8_t { Safe = 0, Failure = 1 };

/// Classification of a simplex interior inferred from its vertex outcomes.
enum class SimplexClass : std::uint8_t { Safe = 0, Failure = 1, Mixed = 2 };

/// How a point was chosen by the extension algorithm.
enum class CandidateKind : std::uint8_t { Exploit = 0, Explore = 1, Screen = 2, Bootstrap = 3 };

/// An evaluated design point, stored in standard Gaussian coordinates.
struct EDPoint {
    int id = -1;
    Vector coords;                 // standard Gaussian space G
    Outcome outcome = Outcome::Safe;
    std::optional<double> raw_g;   // original g value, if the model exposed one
};

inline bool is_failure(Outcome o) { return o == Outcome::Failure; }

} // namespace tessera
