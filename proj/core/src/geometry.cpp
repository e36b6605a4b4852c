#include "vemhr/geometry.hpp"

#include "vemhr/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <utility>

namespace vemhr {

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

} // namespace

double signed_area(std::span<const Vec2> loop)
{
    double twice = 0.0;
    const std::size_t n = loop.size();
    for (std::size_t i = 0; i < n; ++i)
        twice += cross(loop[i], loop[(i + 1) % n]);
    return 0.5 * twice;
}

CellGeometry polygon_metrics(std::span<const Vec2> loop)
{
    const std::size_t n = loop.size();
    if (n < 3)
        throw MeshError("polygon needs at least 3 vertices");

    // Shift by the first vertex to limit cancellation in the shoelace sums.
    const Vec2 origin = loop[0];
    double twice_area = 0.0;
    Vec2 moment = Vec2::Zero();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = loop[i] - origin;
        const Vec2 b = loop[(i + 1) % n] - origin;
        const double w = cross(a, b);
        twice_area += w;
        moment += w * (a + b);
    }
    CellGeometry g;
    g.area = 0.5 * twice_area;
    if (!(g.area > 0.0))
        throw MeshError("degenerate or clockwise polygon (signed area <= 0)");
    g.centroid = origin + moment / (3.0 * twice_area);

    // Signed fan about the centroid; exact for any simple polygon.
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = loop[i] - g.centroid;
        const Vec2 b = loop[(i + 1) % n] - g.centroid;
        const double tri = 0.5 * cross(a, b);
        const Vec2 s = a + b;
        g.ixx += tri / 12.0 * (a.x() * a.x() + b.x() * b.x() + s.x() * s.x());
        g.iyy += tri / 12.0 * (a.y() * a.y() + b.y() * b.y() + s.y() * s.y());
        g.ixy += tri / 12.0 * (a.x() * a.y() + b.x() * b.y() + s.x() * s.y());
    }
    g.second_moment = g.ixx + g.iyy;

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            g.diameter = std::max(g.diameter, (loop[i] - loop[j]).norm());
    return g;
}

PolyMesh PolyMesh::build(std::vector<Vec2> vertices, std::vector<std::vector<int>> cells, MeshInfo info)
{
    PolyMesh mesh;
    mesh.vertices_ = std::move(vertices);
    mesh.cells_ = std::move(cells);
    mesh.info_ = std::move(info);

    for (const Vec2& v : mesh.vertices_)
        if (!std::isfinite(v.x()) || !std::isfinite(v.y()))
            throw MeshError("non-finite vertex coordinate");

    const int nv = mesh.num_vertices();
    std::map<std::pair<int, int>, int> lookup;
    mesh.cell_edges_.resize(mesh.cells_.size());
    mesh.geometry_.reserve(mesh.cells_.size());

    for (int c = 0; c < mesh.num_cells(); ++c) {
        const auto& loop = mesh.cells_[static_cast<std::size_t>(c)];
        const int n = static_cast<int>(loop.size());
        if (n < 3)
            throw MeshError("cell " + std::to_string(c) + " has fewer than 3 vertices");
        for (int id : loop)
            if (id < 0 || id >= nv)
                throw MeshError("cell " + std::to_string(c) + " references vertex out of range");

        mesh.geometry_.push_back(polygon_metrics(mesh.cell_points(c)));

        auto& ce = mesh.cell_edges_[static_cast<std::size_t>(c)];
        ce.reserve(loop.size());
        for (int i = 0; i < n; ++i) {
            const int a = loop[static_cast<std::size_t>(i)];
            const int b = loop[static_cast<std::size_t>((i + 1) % n)];
            if (a == b)
                throw MeshError("degenerate edge in cell " + std::to_string(c));
            const std::pair<int, int> key{std::min(a, b), std::max(a, b)};
            const int sign = a < b ? 1 : -1;

            auto [it, inserted] = lookup.try_emplace(key, mesh.num_edges());
            if (inserted) {
                Edge e;
                e.v = {key.first, key.second};
                const Vec2 d = mesh.vertex(key.second) - mesh.vertex(key.first);
                e.length = d.norm();
                if (!(e.length > 0.0))
                    throw MeshError("zero-length edge between vertices " + std::to_string(key.first) +
                                    " and " + std::to_string(key.second));
                e.tangent = d / e.length;
                e.normal = perp(e.tangent);
                e.midpoint = 0.5 * (mesh.vertex(key.first) + mesh.vertex(key.second));
                mesh.edges_.push_back(e);
            }
            Edge& e = mesh.edges_[static_cast<std::size_t>(it->second)];
            if (e.plus_cell >= 0 && e.minus_cell >= 0)
                throw MeshError("non-manifold edge (" + std::to_string(key.first) + "," +
                                std::to_string(key.second) + ") shared by 3 or more cells");
            int& slot = sign > 0 ? e.plus_cell : e.minus_cell;
            if (slot >= 0)
                throw MeshError("inconsistent orientation on edge (" + std::to_string(key.first) + "," +
                                std::to_string(key.second) + ")");
            slot = c;
            ce.push_back({it->second, sign});
        }
    }
    return mesh;
}

std::vector<Vec2> PolyMesh::cell_points(int c) const
{
    std::vector<Vec2> pts;
    pts.reserve(cells_[static_cast<std::size_t>(c)].size());
    for (int id : cells_[static_cast<std::size_t>(c)])
        pts.push_back(vertex(id));
    return pts;
}

double PolyMesh::mean_edge_length() const
{
    if (edges_.empty())
        return 0.0;
    double sum = 0.0;
    for (const Edge& e : edges_)
        sum += e.length;
    return sum / static_cast<double>(edges_.size());
}

double PolyMesh::total_area() const
{
    double sum = 0.0;
    for (const CellGeometry& g : geometry_)
        sum += g.area;
    return sum;
}

std::uint64_t PolyMesh::checksum() const
{
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const void* data, std::size_t n) {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= bytes[i];
            h *= 1099511628211ull;
        }
    };
    for (const Vec2& v : vertices_) {
        const double xy[2] = {v.x(), v.y()};
        mix(xy, sizeof xy);
    }
    for (const auto& loop : cells_) {
        const auto n = static_cast<std::int64_t>(loop.size());
        mix(&n, sizeof n);
        for (int id : loop) {
            const auto id64 = static_cast<std::int64_t>(id);
            mix(&id64, sizeof id64);
        }
    }
    return h;
}

std::vector<Vec2> clip_half_plane(std::span<const Vec2> poly, const Vec2& point, const Vec2& normal)
{
    std::vector<Vec2> out;
    const std::size_t n = poly.size();
    out.reserve(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& p = poly[i];
        const Vec2& q = poly[(i + 1) % n];
        const double dp = normal.dot(p - point);
        const double dq = normal.dot(q - point);
        if (dp <= 0.0)
            out.push_back(p);
        if ((dp < 0.0 && dq > 0.0) || (dp > 0.0 && dq < 0.0)) {
            const double t = dp / (dp - dq);
            out.push_back(p + t * (q - p));
        }
    }
    // Drop exact repeats produced by vertices lying on the clip line.
    std::vector<Vec2> cleaned;
    cleaned.reserve(out.size());
    for (const Vec2& p : out)
        if (cleaned.empty() || p != cleaned.back())
            cleaned.push_back(p);
    while (cleaned.size() > 1 && cleaned.front() == cleaned.back())
        cleaned.pop_back();
    return cleaned;
}

std::vector<Vec2> polygon_kernel(std::span<const Vec2> loop)
{
    Vec2 lo = loop[0], hi = loop[0];
    for (const Vec2& p : loop) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    std::vector<Vec2> kernel{lo, {hi.x(), lo.y()}, hi, {lo.x(), hi.y()}};
    const std::size_t n = loop.size();
    for (std::size_t i = 0; i < n && kernel.size() >= 3; ++i) {
        const Vec2& a = loop[i];
        const Vec2& b = loop[(i + 1) % n];
        kernel = clip_half_plane(kernel, a, perp(b - a));
    }
    if (kernel.size() < 3 || !(signed_area(kernel) > 0.0))
        return {};
    return kernel;
}

double inscribed_radius(std::span<const Vec2> convex_loop)
{
    const std::size_t n = convex_loop.size();
    if (n < 3)
        return 0.0;
    // Constraints n_i . x + r <= n_i . a_i with unit outward normals; the
    // optimum of this 3-variable LP sits on a vertex, i.e. touches 3 edges.
    std::vector<Vec2> normals;
    std::vector<double> offsets;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 d = convex_loop[(i + 1) % n] - convex_loop[i];
        const double len = d.norm();
        if (len <= 0.0)
            continue;
        const Vec2 nrm = perp(d) / len;
        normals.push_back(nrm);
        offsets.push_back(nrm.dot(convex_loop[i]));
    }
    const std::size_t m = normals.size();
    double scale = 0.0;
    for (const Vec2& p : convex_loop)
        scale = std::max(scale, p.cwiseAbs().maxCoeff());
    const double tol = 1e-12 * std::max(scale, 1.0);

    double best = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            for (std::size_t k = j + 1; k < m; ++k) {
                Eigen::Matrix3d lhs;
                lhs << normals[i].x(), normals[i].y(), 1.0,
                       normals[j].x(), normals[j].y(), 1.0,
                       normals[k].x(), normals[k].y(), 1.0;
                const Eigen::Vector3d rhs(offsets[i], offsets[j], offsets[k]);
                Eigen::FullPivLU<Eigen::Matrix3d> lu(lhs);
                if (!lu.isInvertible())
                    continue;
                const Eigen::Vector3d sol = lu.solve(rhs);
                const double r = sol.z();
                if (!(r > best))
                    continue;
                const Vec2 centre(sol.x(), sol.y());
                bool feasible = true;
                for (std::size_t q = 0; q < m && feasible; ++q)
                    feasible = normals[q].dot(centre) + r <= offsets[q] + tol;
                if (feasible)
                    best = r;
            }
    return best;
}

QualityReport check_assumptions(const PolyMesh& mesh, double gamma_min, double c_min)
{
    QualityReport report;
    report.cells.reserve(static_cast<std::size_t>(mesh.num_cells()));
    report.min_vertex_distance_ratio = std::numeric_limits<double>::infinity();
    report.min_star_ratio = std::numeric_limits<double>::infinity();
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const auto pts = mesh.cell_points(c);
        const double h = mesh.geometry(c).diameter;
        double min_dist = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = i + 1; j < pts.size(); ++j)
                min_dist = std::min(min_dist, (pts[i] - pts[j]).norm());

        CellQuality q;
        q.vertex_distance_ratio = min_dist / h;
        const auto kernel = polygon_kernel(pts);
        q.star_ratio = kernel.empty() ? 0.0 : inscribed_radius(kernel) / h;
        q.flagged = q.star_ratio < gamma_min || q.vertex_distance_ratio < c_min;
        report.num_flagged += q.flagged ? 1 : 0;
        report.min_vertex_distance_ratio = std::min(report.min_vertex_distance_ratio, q.vertex_distance_ratio);
        report.min_star_ratio = std::min(report.min_star_ratio, q.star_ratio);
        report.cells.push_back(q);
    }
    return report;
}

double Domain::area() const { return signed_area(corners); }

bool Domain::contains(const Vec2& p, double tol) const
{
    const std::size_t n = corners.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = corners[i];
        const Vec2 d = corners[(i + 1) % n] - a;
        if (cross(d, p - a) < -tol * d.norm())
            return false;
    }
    return true;
}

Vec2 Domain::map_unit_square(double xi, double eta) const
{
    if (corners.size() != 4)
        throw ValidationError("bilinear map requires a quadrilateral domain");
    return (1.0 - xi) * (1.0 - eta) * corners[0] + xi * (1.0 - eta) * corners[1] + xi * eta * corners[2] +
           (1.0 - xi) * eta * corners[3];
}

Domain unit_square() { return {"unit-square", {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}}}; }

Domain cook_domain() { return {"cook", {{0.0, 0.0}, {48.0, 44.0}, {48.0, 60.0}, {0.0, 44.0}}}; }

} // namespace vemhr
