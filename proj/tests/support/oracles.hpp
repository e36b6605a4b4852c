#pragma once

// Independent reference computations shared by the test suites. Nothing here
// calls into the library's quadrature or element code.

#include "vemhr/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <type_traits>
#include <vector>

namespace vemhr::oracle {

/// Simpson's rule on [-1/2, 1/2], exact for cubics in s.
template <typename F>
auto simpson(F&& f)
{
    using R = std::decay_t<decltype(f(0.0))>;
    const R out = (f(-0.5) + 4.0 * f(0.0) + f(0.5)) / 6.0;
    return out;
}

/// Composite Gauss-Legendre with 5 nodes per panel over [-1/2, 1/2].
template <typename F>
auto composite_gauss(F&& f, int panels = 8)
{
    static const double x[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                0.9061798459386640};
    static const double w[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                                0.2369268850561891};
    const double h = 1.0 / panels;
    using R = std::decay_t<decltype(f(0.0))>;
    R sum = 0.0 * f(0.0);
    for (int p = 0; p < panels; ++p) {
        const double mid = -0.5 + (p + 0.5) * h;
        for (int q = 0; q < 5; ++q)
            sum += (0.5 * h * w[q]) * f(mid + 0.5 * h * x[q]);
    }
    return sum;
}

/// Shoelace area of a counterclockwise loop.
inline double shoelace(const std::vector<Vec2>& p)
{
    double a = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const Vec2& u = p[i];
        const Vec2& v = p[(i + 1) % p.size()];
        a += u.x() * v.y() - v.x() * u.y();
    }
    return 0.5 * a;
}

/// Closed-form polygon moments from Green's theorem.
struct Moments {
    double area, cx, cy, ixx, iyy, ixy; // central second moments
};

inline Moments green_moments(const std::vector<Vec2>& p)
{
    // Work relative to the first vertex to limit cancellation.
    const Vec2 o = p.front();
    double a = 0, sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double x0 = p[i].x() - o.x(), y0 = p[i].y() - o.y();
        const double x1 = p[(i + 1) % p.size()].x() - o.x(), y1 = p[(i + 1) % p.size()].y() - o.y();
        const double cr = x0 * y1 - x1 * y0;
        a += cr;
        sx += (x0 + x1) * cr;
        sy += (y0 + y1) * cr;
        sxx += (x0 * x0 + x0 * x1 + x1 * x1) * cr;
        syy += (y0 * y0 + y0 * y1 + y1 * y1) * cr;
        sxy += (x0 * y1 + 2 * x0 * y0 + 2 * x1 * y1 + x1 * y0) * cr;
    }
    a *= 0.5;
    const double cx = sx / (6 * a), cy = sy / (6 * a);
    const double Ixx = sxx / 12 - a * cx * cx;
    const double Iyy = syy / 12 - a * cy * cy;
    const double Ixy = sxy / 24 - a * cx * cy;
    return {a, cx + o.x(), cy + o.y(), Ixx, Iyy, Ixy};
}

/// Random convex polygon: sorted random angles on a jittered ellipse.
inline std::vector<Vec2> random_convex_polygon(std::mt19937_64& rng, int min_vertices = 3, int max_vertices = 9)
{
    std::uniform_int_distribution<int> nv(min_vertices, max_vertices);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int n = nv(rng);
    for (;;) {
        std::vector<double> ang(static_cast<std::size_t>(n));
        for (double& t : ang)
            t = 2.0 * std::numbers::pi * u(rng);
        std::sort(ang.begin(), ang.end());
        const double rx = 0.2 + 2.0 * u(rng), ry = 0.2 + 2.0 * u(rng);
        const Vec2 shift(10.0 * u(rng) - 5.0, 10.0 * u(rng) - 5.0);
        std::vector<Vec2> p;
        for (double t : ang)
            p.emplace_back(shift.x() + rx * std::cos(t), shift.y() + ry * std::sin(t));
        double min_edge = 1e300, diam = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            min_edge = std::min(min_edge, (p[i] - p[(i + 1) % p.size()]).norm());
            for (const Vec2& q : p)
                diam = std::max(diam, (p[i] - q).norm());
        }
        if (shoelace(p) > 1e-3 * diam * diam && min_edge > 1e-3 * diam)
            return p;
    }
}

/// Random star-shaped (generally non-convex) polygon about the origin.
inline std::vector<Vec2> random_star_polygon(std::mt19937_64& rng, int n)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Vec2> p;
    for (int i = 0; i < n; ++i) {
        const double t = 2.0 * std::numbers::pi * (i + 0.4 * u(rng)) / n;
        const double r = 0.5 + u(rng);
        p.emplace_back(r * std::cos(t), r * std::sin(t));
    }
    return p;
}

inline std::vector<Vec2> regular_polygon(int n, double radius = 1.0, Vec2 centre = Vec2::Zero())
{
    std::vector<Vec2> p;
    for (int i = 0; i < n; ++i) {
        const double t = 2.0 * std::numbers::pi * i / n;
        p.push_back(centre + radius * Vec2(std::cos(t), std::sin(t)));
    }
    return p;
}

/// Single-cell mesh from a loop.
inline PolyMesh single_cell(const std::vector<Vec2>& loop)
{
    std::vector<int> ids(loop.size());
    for (std::size_t i = 0; i < loop.size(); ++i)
        ids[i] = static_cast<int>(i);
    return PolyMesh::build(loop, {ids});
}

} // namespace vemhr::oracle
