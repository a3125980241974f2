#pragma once

#include "tessera/types.hpp"

#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tessera::geom {

/// Hard cap on the space dimension; the exact geometry becomes intractable
/// beyond this and the construction refuses to start.
constexpr int kMaxDim = 8;

/// Duplicate points closer than this are rejected by the triangulation.
constexpr double kDuplicateTol = 1e-12;

/// Canonical simplex identity: sorted vertex ids.
using SimplexKey = std::vector<int>;

/// A hull facet: (nvar-1)-simplex with a supporting hyperplane a.x + b = 0,
/// unit outward normal a. Interior satisfies a.x + b <= 0.
struct Facet {
    Vector normal;
    double offset = 0.0;
    std::vector<int> vertex_ids;
};

/// A face of a simplex with a unit normal oriented away from its owner;
/// vertices are materialized so integration needs no id lookups.
struct OrientedFace {
    Matrix vertices;  // one column per vertex (nvar columns of size nvar)
    Vector normal;
    std::vector<int> vertex_ids;
};

struct Simplex {
    std::vector<int> verts;  // sorted, nvar+1 ids
    double volume = 0.0;
    SimplexClass cls = SimplexClass::Mixed;
};

struct InsertDelta {
    std::vector<SimplexKey> removed;
    std::vector<SimplexKey> added;
    bool hull_changed = false;
};

/// Free-standing simplex measure: |det(x_k - x_0)| / n!.
double simplex_volume(const Matrix& vertices);

/// Circumcenter of a nondegenerate simplex given as columns of `vertices`.
/// Throws std::domain_error when the simplex is numerically degenerate.
Vector circumcenter(const Matrix& vertices);

namespace detail {

// Incremental beneath-beyond convex hull in d dimensions. Used directly for
// the hull of evaluated points and in dimension d = nvar+1 on points lifted
// to the paraboloid, whose lower facets are the Delaunay simplices.
class HullEngine {
public:
    struct HFacet {
        std::vector<int> verts;      // d point ids
        std::vector<int> neighbors;  // facet id across ridge opposite verts[i]
        Vector normal;               // unit, outward
        double offset = 0.0;
        bool alive = false;
    };

    struct Delta {
        std::vector<int> created;
        std::vector<int> deleted;
        std::vector<int> rewired;  // surviving facets whose adjacency changed
        bool inserted = false;     // false when the point was interior
    };

    void init(int dim, const std::vector<Vector>& coords,
              const std::vector<int>& ids);
    Delta add_point(const Vector& coords, int id);

    bool ready() const { return ready_; }
    int dim() const { return dim_; }
    const std::vector<HFacet>& facets() const { return facets_; }
    const Vector& point(int id) const { return points_.at(id); }

private:
    bool visible(const HFacet& f, const Vector& p, int pid) const;
    int orientation_jittered(const std::vector<int>& verts, int pid) const;
    Vector jittered(int id) const;
    int make_facet(std::vector<int> verts);

    int dim_ = 0;
    bool ready_ = false;
    std::vector<Vector> points_;  // indexed by point id
    std::vector<HFacet> facets_;
    std::vector<int> free_slots_;
    Vector interior_;
};

} // namespace detail

/// Delaunay triangulation of evaluated points in standard Gaussian space,
/// maintained incrementally, together with the convex hull of the point set.
/// The Delaunay structure is the lower hull of the points lifted to the
/// paraboloid z = |x|^2; hull facets are Delaunay faces with no neighbor.
class Triangulation {
public:
    explicit Triangulation(int nvar);

    /// Batch construction; throws on degenerate input.
    static Triangulation build(int nvar, const std::vector<EDPoint>& points);

    /// Adds one evaluated point. Returns the simplex-set delta. Throws on
    /// duplicates (closer than kDuplicateTol to an existing point).
    InsertDelta add_point(const EDPoint& p);

    int nvar() const { return nvar_; }
    int num_points() const { return static_cast<int>(points_.size()); }
    const std::vector<EDPoint>& points() const { return points_; }
    const EDPoint& point(int id) const { return points_.at(id); }

    /// True once at least nvar+1 affinely independent points were added.
    bool has_simplices() const { return !by_key_.empty(); }

    const std::map<SimplexKey, int>& by_key() const { return by_key_; }
    const Simplex& cell(int id) const;
    bool cell_alive(int id) const;
    int num_cells() const;
    /// Cell id across the face opposite cell(id).verts[pos]; -1 on the hull.
    int cell_neighbor(int id, int pos) const;

    const std::vector<Facet>& hull_facets() const { return hull_facets_; }
    bool contains(const Vector& x, double tol = 1e-9) const;
    double inscribed_radius() const;  // min_i(-b_i); <= 0 if origin outside
    double circumscribed_radius() const { return max_norm_; }

    Vector cell_circumcenter(int id) const;
    Vector cell_centroid(int id) const;
    Matrix cell_vertices(int id) const;

    /// Maximal face-connected groups of simplices of one classification.
    std::vector<std::vector<int>> clusters(SimplexClass cls) const;

    /// Boundary faces of a group of cells, oriented away from the group.
    std::vector<OrientedFace> cluster_boundary(const std::vector<int>& group) const;

    /// Hull boundary as oriented faces (outward), for divergence integration.
    std::vector<OrientedFace> hull_boundary() const;

    void save(std::ostream& os) const;
    /// Reads a skeleton block and rebuilds the triangulation from its points.
    static Triangulation load(std::istream& is);

private:
    InsertDelta rebuild_from_scratch();
    void sync_cells(const detail::HullEngine::Delta& d, InsertDelta& out);
    void refresh_hull_faces(const std::vector<int>& touched_cells,
                            const std::vector<int>& dead_cells);
    void rebuild_hull_facet_list_full();
    Facet make_hull_facet(const std::vector<int>& face_ids, int omitted_id) const;
    Vector lift(const Vector& x, int id) const;
    bool engine_lower(int fid) const;
    Simplex make_cell(const detail::HullEngine::HFacet& f) const;
    OrientedFace face_of(const Simplex& s, int opposite_pos) const;

    int nvar_ = 0;
    std::vector<EDPoint> points_;
    double max_norm_ = 0.0;

    detail::HullEngine engine_;                  // lifted, dim nvar+1
    std::vector<std::optional<Simplex>> cells_;  // indexed by engine facet id
    std::map<SimplexKey, int> by_key_;

    // single-simplex mode: exactly nvar+1 points, no lifted hull yet
    bool single_mode_ = false;

    std::map<std::vector<int>, Facet> hull_by_face_;
    std::vector<Facet> hull_facets_;
    bool hull_dirty_ = false;
};

/// Convex hull of points in the plain (non-lifted) space. Used while the
/// experimental design contains no failures and no triangulation is kept.
class ConvexHull {
public:
    explicit ConvexHull(int dim);

    /// Returns true when the hull geometry changed (always true while the
    /// initial simplex is still being collected).
    bool add_point(const Vector& x);

    bool ready() const { return engine_.ready(); }
    int dim() const { return dim_; }
    const std::vector<Facet>& facets() const { return facets_; }
    bool contains(const Vector& x, double tol = 1e-9) const;
    double inscribed_radius() const;
    std::vector<OrientedFace> boundary() const;

private:
    void rebuild_facets();

    int dim_;
    std::vector<Vector> coords_;
    detail::HullEngine engine_;
    std::vector<Facet> facets_;
};

/// r = min_i(-b_i) over hull facets; may be <= 0 if the origin is outside.
double inscribed_radius(const std::vector<Facet>& facets);

/// R = max_k ||x_k|| over a point set.
double circumscribed_radius(const std::vector<Vector>& points);

bool contains(const std::vector<Facet>& facets, const Vector& x, double tol = 1e-9);

} // namespace tessera::geom
