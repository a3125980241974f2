#pragma once

#include "tessera/boundary.hpp"
#include "tessera/cubature.hpp"
#include "tessera/geometry.hpp"
#include "tessera/types.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

namespace tessera::est {

/// Simplex classification from binary vertex outcomes.
SimplexClass classify(const std::vector<Outcome>& outcomes);

struct EstimateSnapshot {
    int nsim = 0;
    double p_f_pure = 0.0;  // sum of p_j over purely failure simplices
    double p_f_v = 0.0;     // plus failure shares of mixed simplices
    double p_mix = 0.0;     // sum of p_j over mixed simplices
    double p_out_lower = 0.0;
    double p_out_upper = 1.0;
    std::optional<double> p_out_div;  // divergence-theorem hull integral
    double r = 0.0;                   // inscribed-ball radius (<=0 possible)
    double R = 0.0;                   // most distant evaluated point
};

struct EstimatorParams {
    int gm_index = -1;  // rule index s; -1 selects the dimension default
};

/// Sequential bookkeeping: classifies simplices from vertex outcomes,
/// integrates new failure/mixed simplices after each insertion and keeps
/// the running probability estimates. While the design contains no failure,
/// only the convex hull of the points is maintained.
class Estimator {
public:
    explicit Estimator(int nvar, EstimatorParams params = {});

    EstimateSnapshot update(const Vector& coords, Outcome outcome,
                            std::optional<double> raw_g = std::nullopt);

    int nvar() const { return nvar_; }
    int nsim() const { return static_cast<int>(points_.size()); }
    const std::vector<EDPoint>& points() const { return points_; }
    bool failure_seen() const { return failure_seen_; }

    /// Null while the design is failure-free (exploratory phase).
    const geom::Triangulation* triangulation() const { return tri_ ? &*tri_ : nullptr; }

    /// Hull facets of the evaluated set, whichever structure maintains them.
    const std::vector<geom::Facet>& hull_facets() const;
    bool hull_ready() const { return !hull_facets().empty(); }
    double inscribed_r() const;
    double circumscribed_R() const { return max_norm_; }

    /// Probability outside: divergence estimate when fresh, else the
    /// ball-based bound from R.
    double current_p_out() const;

    /// Cached probability content of a failure/mixed cell.
    double pj(int cell_id) const;
    /// Heaviest mixed simplex: (p_j, cell id); (0, -1) when none exist.
    std::pair<double, int> max_mixed_pj() const;

    const std::vector<EstimateSnapshot>& history() const { return history_; }
    const EstimateSnapshot& last() const { return history_.back(); }

    const cubature::CubatureRule& volume_rule() const { return volume_rule_; }
    const cubature::CubatureRule& face_rule() const { return face_rule_; }
    int negative_cubature_events() const { return neg_events_; }
    int degenerate_circumcenter_events() const { return degen_events_; }
    void note_degenerate_circumcenter() { ++degen_events_; }

    struct Audit {
        double p_f_pure = 0.0;
        double p_mix = 0.0;
        double p_safe_div = 0.0;  // safe clusters integrated via divergence
        double p_out_div = 0.0;
        double total = 0.0;       // should be 1
    };
    /// Independent partition audit; requires a triangulated state.
    Audit partition_audit() const;

    void save_skeleton(std::ostream& os) const;
    /// Rebuilds an estimator by replaying a recorded experimental design.
    static Estimator replay(int nvar, EstimatorParams params,
                            const std::vector<EDPoint>& points);

    /// CSV header and row formatting for the convergence log.
    static const char* csv_header();
    static std::string csv_row(const EstimateSnapshot& s);

private:
    void integrate_cell(int cell_id);
    EstimateSnapshot compute_snapshot();

    int nvar_;
    EstimatorParams params_;
    cubature::CubatureRule volume_rule_;
    cubature::CubatureRule face_rule_;

    std::vector<EDPoint> points_;
    double max_norm_ = 0.0;
    bool failure_seen_ = false;

    geom::ConvexHull hull_;                      // exploratory phase
    std::optional<geom::Triangulation> tri_;     // after the first failure

    struct CellProb {
        double pj = 0.0;
        double pjf = 0.0;  // failure share (mixed cells)
    };
    std::map<geom::SimplexKey, CellProb> prob_;  // failure/mixed cells only

    bool hull_stale_ = true;
    std::optional<double> p_out_div_;
    int neg_events_ = 0;
    int degen_events_ = 0;
    std::vector<EstimateSnapshot> history_;
};

} // namespace tessera::est
