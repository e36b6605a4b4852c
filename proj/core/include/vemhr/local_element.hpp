#pragma once

#include "vemhr/fields.hpp"
#include "vemhr/geometry.hpp"
#include "vemhr/material.hpp"
#include "vemhr/quadrature.hpp"

#include <Eigen/Core>

#include <array>
#include <span>
#include <string_view>
#include <vector>

namespace vemhr {

/// Traction on an edge in the global edge frame: tau n_e = c + d s n_e with
/// the arc coordinate s in [-1/2, 1/2]. A cell with edge sign `sign` sees the
/// outward traction sign * (c + d s n_e).
struct EdgeTraction {
    Vec2 c = Vec2::Zero();
    double d = 0.0;
};

/// a + b (x - x_C)^perp, anchored at a cell centroid.
struct RigidMotion {
    Vec2 a = Vec2::Zero();
    double b = 0.0;

    [[nodiscard]] Vec2 operator()(const Vec2& x, const Vec2& centre) const { return a + b * perp(x - centre); }
};

/// Canonical basis (1,0;0), (0,1;0), (0,0;1) of the rigid motions.
std::array<RigidMotion, 3> rm_basis();

enum class Stabilization {
    diameter,    ///< kappa h_E  int_{dE}
    edge_length, ///< kappa sum_e h_e int_e
};

std::string_view to_string(Stabilization s);
/// Accepts "stab1" / "diameter" and "stab1bis" / "edge_length".
Stabilization parse_stabilization(std::string_view name);

/// Mean and first moment of a traction field along an edge, projected into
/// the (c, d) representation. `traction` returns tau n_e at a point of the
/// edge. `anchor` is the point used in the (x - anchor)^perp moment; any anchor
/// gives the same result up to roundoff.
EdgeTraction edge_moments(const Edge& edge, const VectorField& traction, const Vec2& anchor,
                          const EdgeRule& rule);

/// int_e g . (chi_k n_out) for the three DOF basis fields of a boundary edge,
/// where `sign` is the edge sign of its cell.
Eigen::Vector3d dirichlet_boundary_term(const Edge& edge, int sign, const VectorField& g, const EdgeRule& rule);

/// Global interpolant: every edge gets the moments of tau n_e. Both cells of
/// an interior edge therefore read identical DOFs.
std::vector<EdgeTraction> interpolate_global(const PolyMesh& mesh, const TensorField& tau, int degree = 6);

/// Per-polygon operators of the lowest-order stress element. The local DOF
/// vector lists the cell's edges in counterclockwise order, three values per
/// edge (c_x, c_y, d) in the global edge frame; edge signs are folded into
/// every operator.
class LocalElement {
public:
    using RowMap = Eigen::Matrix<double, 3, Eigen::Dynamic>;

    LocalElement(const PolyMesh& mesh, int cell);

    [[nodiscard]] int cell() const { return cell_; }
    [[nodiscard]] int num_edges() const { return static_cast<int>(edges_.size()); }
    [[nodiscard]] int num_dofs() const { return 3 * num_edges(); }
    [[nodiscard]] const CellGeometry& geometry() const { return geom_; }
    [[nodiscard]] std::span<const CellEdge> edges() const { return edges_; }

    /// DOFs -> (alpha_x, alpha_y, beta) of the divergence alpha + beta (x - x_C)^perp.
    [[nodiscard]] const RowMap& divergence_map() const { return div_map_; }
    /// DOFs -> cell mean of the stress as (xx, yy, xy).
    [[nodiscard]] const RowMap& mean_map() const { return mean_map_; }

    [[nodiscard]] RigidMotion divergence(const Eigen::VectorXd& dofs) const;
    [[nodiscard]] SymTensor2 mean_stress(const Eigen::VectorXd& dofs) const;

    /// Stabilized local form: |E| D(Pi chi_i):(Pi chi_j) + boundary stabilization
    /// weighted by scale * material.kappa().
    [[nodiscard]] Eigen::MatrixXd stiffness(const IsotropicMaterial& material, Stabilization variant,
                                            double scale = 1.0) const;
    /// Rows int_E div(chi_k) . r for the three rigid-motion basis fields r.
    [[nodiscard]] RowMap coupling() const;
    /// int_E f . r for the rigid-motion basis fields.
    [[nodiscard]] Eigen::Vector3d load(const VectorField& f, int degree = 6) const;

    /// Local DOFs whose tractions are those of a constant tensor.
    [[nodiscard]] Eigen::VectorXd constant_dofs(const SymTensor2& s) const;
    /// Local interpolant: edge means and first moments of tau n.
    [[nodiscard]] Eigen::VectorXd interpolate(const TensorField& tau, int degree = 6) const;
    /// Extracts this cell's entries from a global per-edge array.
    [[nodiscard]] Eigen::VectorXd gather(std::span<const EdgeTraction> global) const;

private:
    const PolyMesh* mesh_;
    int cell_;
    CellGeometry geom_;
    std::vector<CellEdge> edges_;
    RowMap div_map_;
    RowMap mean_map_;
};

} // namespace vemhr
