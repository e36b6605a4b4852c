#include "vemhr/quadrature.hpp"

#include "vemhr/error.hpp"

#include <cmath>
#include <numbers>

namespace vemhr {

namespace {

// Gauss-Legendre on [-1, 1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w)
{
    x.assign(static_cast<std::size_t>(n), 0.0);
    w.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16)
                break;
        }
        // Recompute the derivative at the converged root.
        double p0 = 1.0, p1 = z;
        for (int k = 2; k <= n; ++k) {
            const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = pk;
        }
        dp = n * (z * p1 - p0) / (z * z - 1.0);
        x[static_cast<std::size_t>(i)] = z;
        w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
}

void add_orbit3(TriangleRule& r, double a, double w)
{
    const double b = 1.0 - 2.0 * a;
    r.barycentric.push_back({a, a, b});
    r.barycentric.push_back({a, b, a});
    r.barycentric.push_back({b, a, a});
    for (int k = 0; k < 3; ++k)
        r.weights.push_back(w);
}

void add_orbit6(TriangleRule& r, double a, double b, double w)
{
    const double c = 1.0 - a - b;
    for (const auto& p : {std::array{a, b, c}, std::array{a, c, b}, std::array{b, a, c}, std::array{b, c, a},
                          std::array{c, a, b}, std::array{c, b, a}}) {
        r.barycentric.push_back(p);
        r.weights.push_back(w);
    }
}

} // namespace

EdgeRule edge_rule(int degree)
{
    if (degree < 0)
        throw ValidationError("quadrature degree must be >= 0");
    const int n = std::max(1, (degree + 2) / 2);
    EdgeRule rule;
    rule.degree = degree;
    gauss_legendre(n, rule.nodes, rule.weights);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        rule.nodes[q] *= 0.5;
        rule.weights[q] *= 0.5;
    }
    return rule;
}

TriangleRule triangle_rule(int degree)
{
    if (degree < 0)
        throw ValidationError("quadrature degree must be >= 0");
    TriangleRule r;
    r.degree = degree;
    switch (degree) {
    case 0:
    case 1:
        r.barycentric.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
        r.weights.push_back(1.0);
        return r;
    case 2:
        add_orbit3(r, 1.0 / 6.0, 1.0 / 3.0);
        return r;
    case 3:
    case 4:
        // Dunavant degree 4; no positive 6-point symmetric degree-3 rule is cheaper.
        add_orbit3(r, 0.445948490915965, 0.223381589678011);
        add_orbit3(r, 0.091576213509771, 0.109951743655322);
        return r;
    case 5:
        r.barycentric.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
        r.weights.push_back(0.225);
        add_orbit3(r, 0.470142064105115, 0.132394152788506);
        add_orbit3(r, 0.101286507323456, 0.125939180544827);
        return r;
    case 6:
        add_orbit3(r, 0.249286745170910, 0.116786275726379);
        add_orbit3(r, 0.063089014491502, 0.050844906370207);
        add_orbit6(r, 0.053145049844817, 0.310352451033784, 0.082851075618374);
        return r;
    default:
        break;
    }
    // Collapsed (Duffy) Gauss product: x = u, y = v (1 - u), Jacobian (1 - u).
    const int n = (degree + 3) / 2;
    std::vector<double> x, w;
    gauss_legendre(n, x, w);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double u = 0.5 * (x[static_cast<std::size_t>(i)] + 1.0);
            const double v = 0.5 * (x[static_cast<std::size_t>(j)] + 1.0);
            const double l1 = u, l2 = v * (1.0 - u);
            r.barycentric.push_back({1.0 - l1 - l2, l1, l2});
            // Reference area 1/2 normalised to 1.
            r.weights.push_back(2.0 * 0.25 * w[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(j)] * (1.0 - u));
        }
    return r;
}

PolygonRule polygon_rule(std::span<const Vec2> loop, const Vec2& centre, int degree)
{
    const TriangleRule tri = triangle_rule(degree);
    const double area = signed_area(loop);
    PolygonRule rule;
    rule.degree = degree;
    const std::size_t n = loop.size();
    rule.points.reserve(n * tri.weights.size());
    rule.weights.reserve(n * tri.weights.size());
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = loop[i];
        const Vec2& b = loop[(i + 1) % n];
        const Vec2 da = a - centre, db = b - centre;
        const double t_area = 0.5 * (da.x() * db.y() - da.y() * db.x());
        if (std::abs(t_area) < 1e-14 * std::abs(area))
            continue;
        for (std::size_t q = 0; q < tri.weights.size(); ++q) {
            const auto& l = tri.barycentric[q];
            rule.points.push_back(l[0] * centre + l[1] * a + l[2] * b);
            rule.weights.push_back(tri.weights[q] * t_area);
        }
    }
    return rule;
}

PolygonRule polygon_rule(std::span<const Vec2> loop, int degree)
{
    return polygon_rule(loop, polygon_metrics(loop).centroid, degree);
}

} // namespace vemhr
