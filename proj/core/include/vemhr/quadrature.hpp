#pragma once

#include "vemhr/geometry.hpp"

#include <array>
#include <span>
#include <vector>

namespace vemhr {

/// Gauss-Legendre rule on the arc coordinate s in [-1/2, 1/2]. Weights sum
/// to 1; multiply by the edge length for a physical integral.
struct EdgeRule {
    int degree = 0;
    std::vector<double> nodes;
    std::vector<double> weights;
};

EdgeRule edge_rule(int degree);

/// Barycentric rule on the reference triangle, weights summing to 1.
struct TriangleRule {
    int degree = 0;
    std::vector<std::array<double, 3>> barycentric;
    std::vector<double> weights;
};

/// Symmetric rules up to degree 6, collapsed Gauss products above.
TriangleRule triangle_rule(int degree);

/// Physical points and weights over a polygon; weights sum to its area.
struct PolygonRule {
    int degree = 0;
    std::vector<Vec2> points;
    std::vector<double> weights;

    template <typename F>
    auto integrate(F&& f) const
    {
        auto sum = decltype(f(points[0]))(weights[0] * f(points[0]));
        for (std::size_t q = 1; q < points.size(); ++q)
            sum += weights[q] * f(points[q]);
        return sum;
    }
};

/// Fan triangulation about `centre` (normally the centroid) with a
/// `degree`-exact rule on every fan triangle. Slivers with area below
/// 1e-14 |E| are skipped.
PolygonRule polygon_rule(std::span<const Vec2> loop, const Vec2& centre, int degree);

/// Same, using the polygon centroid as the fan centre.
PolygonRule polygon_rule(std::span<const Vec2> loop, int degree);

/// Integral over an edge of the mesh with the given rule (physical measure).
template <typename F>
auto integrate_edge(const Edge& edge, const EdgeRule& rule, F&& f)
{
    auto sum = decltype(f(0.0))(rule.weights[0] * f(rule.nodes[0]));
    for (std::size_t q = 1; q < rule.nodes.size(); ++q)
        sum += rule.weights[q] * f(rule.nodes[q]);
    return decltype(sum)(edge.length * sum);
}

} // namespace vemhr
