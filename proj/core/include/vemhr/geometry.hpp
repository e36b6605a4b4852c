#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace vemhr {

using Vec2 = Eigen::Vector2d;

/// Clockwise quarter turn, (c1, c2) -> (c2, -c1).
inline Vec2 perp(const Vec2& c) { return {c.y(), -c.x()}; }

/// Geometric quantities of one polygonal cell. Moments are central, i.e.
/// taken about the centroid.
struct CellGeometry {
    double area = 0.0;
    Vec2 centroid = Vec2::Zero();
    double diameter = 0.0;
    double second_moment = 0.0; ///< int_E |x - x_C|^2
    double ixx = 0.0;           ///< int_E (x - x_C)^2
    double iyy = 0.0;           ///< int_E (y - y_C)^2
    double ixy = 0.0;           ///< int_E (x - x_C)(y - y_C)
};

/// Area, centroid, diameter and central second moments of a counterclockwise
/// polygon. Throws MeshError if the signed area is not positive.
CellGeometry polygon_metrics(std::span<const Vec2> loop);

/// Signed shoelace area (positive for counterclockwise loops).
double signed_area(std::span<const Vec2> loop);

/// A globally oriented mesh edge, running from vertex v[0] to v[1] with
/// v[0] < v[1]. The normal is the tangent turned clockwise. The cell for
/// which this normal is outward is `plus_cell`; the other one is `minus_cell`.
struct Edge {
    std::array<int, 2> v{-1, -1};
    Vec2 tangent = Vec2::Zero();
    Vec2 normal = Vec2::Zero();
    Vec2 midpoint = Vec2::Zero();
    double length = 0.0;
    int plus_cell = -1;
    int minus_cell = -1;

    [[nodiscard]] bool is_boundary() const { return plus_cell < 0 || minus_cell < 0; }
    /// The single incident cell of a boundary edge.
    [[nodiscard]] int boundary_cell() const { return plus_cell >= 0 ? plus_cell : minus_cell; }
    /// Point at arc coordinate s in [-1/2, 1/2].
    [[nodiscard]] Vec2 point(double s) const { return midpoint + s * length * tangent; }
};

/// One entry of a cell's counterclockwise boundary: the global edge and the
/// sign (+1 when the edge normal points out of the cell).
struct CellEdge {
    int edge = -1;
    int sign = 0;
};

/// Provenance of a generated mesh.
struct MeshInfo {
    std::string kind = "file";
    int resolution = 0;
    std::uint64_t seed = 0;
    int lloyd_iterations = 0;
    bool lloyd_converged = true;
    int collapsed_edges = 0;
};

/// Immutable polygonal mesh with deduplicated, canonically oriented edges.
class PolyMesh {
public:
    PolyMesh() = default;

    /// Builds edge topology from counterclockwise vertex loops. Throws
    /// MeshError on non-manifold or inconsistently oriented edges, zero-length
    /// edges, or cells with non-positive area.
    static PolyMesh build(std::vector<Vec2> vertices, std::vector<std::vector<int>> cells,
                          MeshInfo info = {});

    [[nodiscard]] int num_vertices() const { return static_cast<int>(vertices_.size()); }
    [[nodiscard]] int num_cells() const { return static_cast<int>(cells_.size()); }
    [[nodiscard]] int num_edges() const { return static_cast<int>(edges_.size()); }

    [[nodiscard]] const std::vector<Vec2>& vertices() const { return vertices_; }
    [[nodiscard]] const Vec2& vertex(int i) const { return vertices_[static_cast<std::size_t>(i)]; }
    [[nodiscard]] const std::vector<std::vector<int>>& cells() const { return cells_; }
    [[nodiscard]] std::span<const int> cell_vertices(int c) const { return cells_[static_cast<std::size_t>(c)]; }
    [[nodiscard]] std::span<const CellEdge> cell_edges(int c) const { return cell_edges_[static_cast<std::size_t>(c)]; }
    [[nodiscard]] const std::vector<Edge>& edges() const { return edges_; }
    [[nodiscard]] const Edge& edge(int e) const { return edges_[static_cast<std::size_t>(e)]; }
    [[nodiscard]] const CellGeometry& geometry(int c) const { return geometry_[static_cast<std::size_t>(c)]; }
    [[nodiscard]] std::vector<Vec2> cell_points(int c) const;

    [[nodiscard]] double mean_edge_length() const;
    [[nodiscard]] double total_area() const;
    [[nodiscard]] const MeshInfo& info() const { return info_; }

    /// FNV-1a hash over coordinates and cell lists.
    [[nodiscard]] std::uint64_t checksum() const;

private:
    std::vector<Vec2> vertices_;
    std::vector<std::vector<int>> cells_;
    std::vector<std::vector<CellEdge>> cell_edges_;
    std::vector<Edge> edges_;
    std::vector<CellGeometry> geometry_;
    MeshInfo info_;
};

struct CellQuality {
    double vertex_distance_ratio = 0.0; ///< min pairwise vertex distance / h_E
    double star_ratio = 0.0;            ///< inscribed radius of the kernel / h_E
    bool flagged = false;
};

struct QualityReport {
    std::vector<CellQuality> cells;
    double min_vertex_distance_ratio = 0.0;
    double min_star_ratio = 0.0;
    int num_flagged = 0;
};

/// Checks the star-shapedness (gamma_min) and vertex-separation (c_min)
/// regularity assumptions cell by cell.
QualityReport check_assumptions(const PolyMesh& mesh, double gamma_min, double c_min);

/// Kernel of a simple counterclockwise polygon (the region from which the
/// whole polygon is visible). Empty if the polygon is not star-shaped.
std::vector<Vec2> polygon_kernel(std::span<const Vec2> loop);

/// Radius of the largest disc inscribed in a convex counterclockwise polygon.
double inscribed_radius(std::span<const Vec2> convex_loop);

/// Clips a convex counterclockwise polygon to the half-plane
/// { x : normal . (x - point) <= 0 }.
std::vector<Vec2> clip_half_plane(std::span<const Vec2> poly, const Vec2& point, const Vec2& normal);

/// Convex counterclockwise polygon describing the computational domain.
struct Domain {
    std::string name;
    std::vector<Vec2> corners;

    [[nodiscard]] double area() const;
    [[nodiscard]] bool contains(const Vec2& p, double tol = 0.0) const;
    /// Bilinear image of the unit square; corners must be a quadrilateral.
    [[nodiscard]] Vec2 map_unit_square(double xi, double eta) const;
};

Domain unit_square();

/// Cook's membrane: (0,0), (48,44), (48,60), (0,44).
Domain cook_domain();

} // namespace vemhr
