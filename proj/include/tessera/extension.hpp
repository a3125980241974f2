#pragma once

#include "tessera/estimator.hpp"
#include "tessera/rng.hpp"
#include "tessera/types.hpp"

namespace tessera::ext {

struct Params {
    int pool_size = 100;           // random candidates per exploration step
    double offset_q = 1.0;         // radius addition in the offset rule
    int screening_k = 0;           // every k-th point is a screening point; 0 = off
    double duplicate_guard = 1e-9; // reject candidates this close to evaluated points
    double min_offset = 0.1;       // clamp when the offset formula degenerates
};

struct Candidate {
    Vector coords;
    CandidateKind kind = CandidateKind::Explore;
    double score = 0.0;   // p_j for exploit, psi for explore/screen
    int simplex_id = -1;  // exploit/screen source cell
    int facet_id = -1;    // explore source facet index
    bool offset_clamped = false;
    bool degenerate_circumcenter = false;
};

/// Exploration offset: o = S_chi^-1(P_O / Sur[B_{R+q}]) - r, clamped to a
/// minimum when the formula argument leaves (0,1).
double exploration_offset(double p_out, double r, double R, int nvar, const Params& p,
                          bool* clamped = nullptr);

/// psi criterion: sqrt(f_c * f_s) * l^nvar, with f the standard Gaussian
/// density at the candidate and its nearest evaluated point, l their distance.
double psi_score(const Vector& candidate, const std::vector<EDPoint>& points, int nvar);

/// Decision rule: exploit the heaviest mixed simplex when its probability
/// content exceeds p_beta = Phi(-r), otherwise explore behind the critical
/// facet. A configured screening cadence overrides both.
Candidate decide(const est::Estimator& state, const Params& params, const CounterRng& rng,
                 int step_index);

Candidate exploit_candidate(const est::Estimator& state, int cell_id, const Params& params);
Candidate explore_candidate(const est::Estimator& state, int facet_index, const Params& params,
                            const CounterRng& rng);
Candidate screen_candidate(const est::Estimator& state, const Params& params);

} // namespace tessera::ext
