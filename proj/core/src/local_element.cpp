#include "vemhr/local_element.hpp"

#include "vemhr/error.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>

namespace vemhr {

std::array<RigidMotion, 3> rm_basis()
{
    return {RigidMotion{{1.0, 0.0}, 0.0}, RigidMotion{{0.0, 1.0}, 0.0}, RigidMotion{{0.0, 0.0}, 1.0}};
}

std::string_view to_string(Stabilization s)
{
    return s == Stabilization::diameter ? "stab1" : "stab1bis";
}

Stabilization parse_stabilization(std::string_view name)
{
    if (name == "stab1" || name == "diameter")
        return Stabilization::diameter;
    if (name == "stab1bis" || name == "edge_length")
        return Stabilization::edge_length;
    throw ValidationError("unknown stabilization '" + std::string(name) + "'");
}

EdgeTraction edge_moments(const Edge& edge, const VectorField& traction, const Vec2& anchor, const EdgeRule& rule)
{
    EdgeTraction out;
    std::vector<Vec2> values(rule.nodes.size());
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        values[q] = traction(edge.point(rule.nodes[q]));
        out.c += rule.weights[q] * values[q];
    }
    // d (|e|/12) n.(q - p)^perp = int_e (t - c) . (x - anchor)^perp
    double moment = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q)
        moment += rule.weights[q] * (values[q] - out.c).dot(perp(edge.point(rule.nodes[q]) - anchor));
    moment *= edge.length;
    const double coeff = edge.length / 12.0 * edge.normal.dot(perp(edge.length * edge.tangent));
    if (!(std::abs(coeff) > 0.0))
        throw MeshError("degenerate moment coefficient on edge");
    out.d = moment / coeff;
    return out;
}

Eigen::Vector3d dirichlet_boundary_term(const Edge& edge, int sign, const VectorField& g, const EdgeRule& rule)
{
    Eigen::Vector3d out = Eigen::Vector3d::Zero();
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double s = rule.nodes[q];
        const Vec2 gv = g(edge.point(s));
        out += rule.weights[q] * Eigen::Vector3d(gv.x(), gv.y(), s * gv.dot(edge.normal));
    }
    return sign * edge.length * out;
}

std::vector<EdgeTraction> interpolate_global(const PolyMesh& mesh, const TensorField& tau, int degree)
{
    const EdgeRule rule = edge_rule(degree);
    std::vector<EdgeTraction> out;
    out.reserve(static_cast<std::size_t>(mesh.num_edges()));
    for (const Edge& e : mesh.edges())
        out.push_back(edge_moments(e, [&](const Vec2& x) { return tau(x) * e.normal; }, e.midpoint, rule));
    return out;
}

LocalElement::LocalElement(const PolyMesh& mesh, int cell)
    : mesh_(&mesh), cell_(cell), geom_(mesh.geometry(cell)),
      edges_(mesh.cell_edges(cell).begin(), mesh.cell_edges(cell).end())
{
    const int n = num_dofs();
    div_map_ = RowMap::Zero(3, n);
    mean_map_ = RowMap::Zero(3, n);
    const double area = geom_.area;
    const double m2 = geom_.second_moment;
    if (!(area > 0.0) || !(m2 > 0.0))
        throw MeshError("degenerate cell " + std::to_string(cell));

    // int_E (x - x_C)^perp (x - x_C)^T, with (x - x_C)^perp = (dy, -dx).
    Eigen::Matrix2d interior;
    interior << geom_.ixy, geom_.iyy, -geom_.ixx, -geom_.ixy;

    for (int i = 0; i < num_edges(); ++i) {
        const auto& ce = edges_[static_cast<std::size_t>(i)];
        const Edge& e = mesh.edge(ce.edge);
        const double sl = ce.sign * e.length;
        const Vec2 r = e.midpoint - geom_.centroid;
        const Vec2 rp = perp(r);

        // Divergence: alpha from the edge means, beta from the rotational moment.
        div_map_(0, 3 * i) = sl / area;
        div_map_(1, 3 * i + 1) = sl / area;
        div_map_(2, 3 * i) = sl * rp.x() / m2;
        div_map_(2, 3 * i + 1) = sl * rp.y() / m2;
        div_map_(2, 3 * i + 2) = sl * e.length / (12.0 * m2);

        // Boundary part of |E| Pi = int_dE phi (x - x_C)^T - int_E div (x - x_C)^T.
        std::array<Eigen::Matrix2d, 3> boundary;
        boundary[0] << r.x(), r.y(), 0.0, 0.0;
        boundary[1] << 0.0, 0.0, r.x(), r.y();
        boundary[2] = e.normal * e.tangent.transpose() * (e.length / 12.0);
        for (int k = 0; k < 3; ++k) {
            const Eigen::Matrix2d m = (sl * boundary[static_cast<std::size_t>(k)] - div_map_(2, 3 * i + k) * interior) / area;
            mean_map_(0, 3 * i + k) = m(0, 0);
            mean_map_(1, 3 * i + k) = m(1, 1);
            mean_map_(2, 3 * i + k) = 0.5 * (m(0, 1) + m(1, 0));
        }
    }
}

RigidMotion LocalElement::divergence(const Eigen::VectorXd& dofs) const
{
    const Eigen::Vector3d v = div_map_ * dofs;
    return {{v(0), v(1)}, v(2)};
}

SymTensor2 LocalElement::mean_stress(const Eigen::VectorXd& dofs) const
{
    return SymTensor2::from_triple(mean_map_ * dofs);
}

Eigen::MatrixXd LocalElement::stiffness(const IsotropicMaterial& material, Stabilization variant, double scale) const
{
    const int n = num_dofs();
    const Eigen::Matrix3d energy = material.d_matrix().transpose() * contraction_weights();
    Eigen::MatrixXd a = geom_.area * mean_map_.transpose() * energy * mean_map_;

    const double kappa = scale * material.kappa();
    Eigen::Matrix<double, 2, Eigen::Dynamic> constant_part(2, n);
    Eigen::Matrix<double, 2, Eigen::Dynamic> linear_part(2, n);
    for (int i = 0; i < num_edges(); ++i) {
        const Edge& e = mesh_->edge(edges_[static_cast<std::size_t>(i)].edge);
        const Vec2& nrm = e.normal;
        // (chi_k - Pi chi_k) n_e = G_k + s H_k on this edge; the sign squares out.
        for (int k = 0; k < n; ++k) {
            const Vec2 pn = SymTensor2::from_triple(mean_map_.col(k)) * nrm;
            constant_part.col(k) = -pn;
        }
        constant_part(0, 3 * i) += 1.0;
        constant_part(1, 3 * i + 1) += 1.0;
        linear_part.setZero();
        linear_part.col(3 * i + 2) = nrm;

        const double weight = variant == Stabilization::diameter ? geom_.diameter : e.length;
        a += kappa * weight * e.length *
             (constant_part.transpose() * constant_part + linear_part.transpose() * linear_part / 12.0);
    }
    return 0.5 * (a + a.transpose());
}

LocalElement::RowMap LocalElement::coupling() const
{
    RowMap b = div_map_;
    b.row(0) *= geom_.area;
    b.row(1) *= geom_.area;
    b.row(2) *= geom_.second_moment;
    return b;
}

Eigen::Vector3d LocalElement::load(const VectorField& f, int degree) const
{
    const auto pts = mesh_->cell_points(cell_);
    const PolygonRule rule = polygon_rule(pts, geom_.centroid, degree);
    Eigen::Vector3d out = Eigen::Vector3d::Zero();
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const Vec2 fv = f(rule.points[q]);
        out += rule.weights[q] * Eigen::Vector3d(fv.x(), fv.y(), fv.dot(perp(rule.points[q] - geom_.centroid)));
    }
    return out;
}

Eigen::VectorXd LocalElement::constant_dofs(const SymTensor2& s) const
{
    Eigen::VectorXd dofs = Eigen::VectorXd::Zero(num_dofs());
    for (int i = 0; i < num_edges(); ++i) {
        const Vec2 t = s * mesh_->edge(edges_[static_cast<std::size_t>(i)].edge).normal;
        dofs(3 * i) = t.x();
        dofs(3 * i + 1) = t.y();
    }
    return dofs;
}

Eigen::VectorXd LocalElement::interpolate(const TensorField& tau, int degree) const
{
    const EdgeRule rule = edge_rule(degree);
    Eigen::VectorXd dofs(num_dofs());
    for (int i = 0; i < num_edges(); ++i) {
        const Edge& e = mesh_->edge(edges_[static_cast<std::size_t>(i)].edge);
        const EdgeTraction t = edge_moments(e, [&](const Vec2& x) { return tau(x) * e.normal; }, e.midpoint, rule);
        dofs(3 * i) = t.c.x();
        dofs(3 * i + 1) = t.c.y();
        dofs(3 * i + 2) = t.d;
    }
    return dofs;
}

Eigen::VectorXd LocalElement::gather(std::span<const EdgeTraction> global) const
{
    Eigen::VectorXd dofs(num_dofs());
    for (int i = 0; i < num_edges(); ++i) {
        const EdgeTraction& t = global[static_cast<std::size_t>(edges_[static_cast<std::size_t>(i)].edge)];
        dofs(3 * i) = t.c.x();
        dofs(3 * i + 1) = t.c.y();
        dofs(3 * i + 2) = t.d;
    }
    return dofs;
}

} // namespace vemhr
