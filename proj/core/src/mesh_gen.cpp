#include "vemhr/mesh_gen.hpp"

#include "vemhr/error.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <tuple>
#include <unordered_map>

namespace vemhr {

namespace {

constexpr std::array<std::pair<std::string_view, MeshKind>, 10> kKindNames{{
    {"tri_structured", MeshKind::tri_structured},
    {"quad_structured", MeshKind::quad_structured},
    {"hex_structured", MeshKind::hex_structured},
    {"tri_unstructured", MeshKind::tri_unstructured},
    {"quad_unstructured", MeshKind::quad_unstructured},
    {"poly_voronoi_random", MeshKind::poly_voronoi_random},
    {"poly_voronoi_cvt", MeshKind::poly_voronoi_cvt},
    {"quad", MeshKind::quad_structured},
    {"rvor", MeshKind::poly_voronoi_random},
    {"cvor", MeshKind::poly_voronoi_cvt},
}};

double domain_diameter(const Domain& domain)
{
    double d = 0.0;
    for (const Vec2& a : domain.corners)
        for (const Vec2& b : domain.corners)
            d = std::max(d, (a - b).norm());
    return d;
}

// Structured (optionally jittered) grid in the unit-square parameter space,
// mapped bilinearly onto the quadrilateral domain.
PolyMesh grid_mesh(int n, const Domain& domain, bool triangles, bool jittered, const GeneratorOptions& opt,
                   MeshKind kind)
{
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> jitter(-opt.jitter, opt.jitter);
    std::bernoulli_distribution coin(0.5);

    const double h = 1.0 / n;
    std::vector<Vec2> vertices;
    vertices.reserve(static_cast<std::size_t>((n + 1) * (n + 1)));
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) {
            double xi = i * h;
            double eta = j * h;
            if (jittered) {
                const double dx = jitter(rng) * h;
                const double dy = jitter(rng) * h;
                if (i > 0 && i < n)
                    xi += dx;
                if (j > 0 && j < n)
                    eta += dy;
            }
            vertices.push_back(domain.map_unit_square(xi, eta));
        }

    auto id = [n](int i, int j) { return j * (n + 1) + i; };
    std::vector<std::vector<int>> cells;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const int v00 = id(i, j), v10 = id(i + 1, j), v11 = id(i + 1, j + 1), v01 = id(i, j + 1);
            if (!triangles) {
                cells.push_back({v00, v10, v11, v01});
            } else if (jittered && coin(rng)) {
                cells.push_back({v00, v10, v01});
                cells.push_back({v10, v11, v01});
            } else {
                cells.push_back({v00, v10, v11});
                cells.push_back({v00, v11, v01});
            }
        }

    MeshInfo info;
    info.kind = std::string(to_string(kind));
    info.resolution = n;
    info.seed = jittered ? opt.seed : 0;
    return PolyMesh::build(std::move(vertices), std::move(cells), info);
}

std::vector<Vec2> random_seeds(int count, const Domain& domain, std::mt19937_64& rng)
{
    Vec2 lo = domain.corners[0], hi = domain.corners[0];
    for (const Vec2& c : domain.corners) {
        lo = lo.cwiseMin(c);
        hi = hi.cwiseMax(c);
    }
    std::uniform_real_distribution<double> ux(lo.x(), hi.x());
    std::uniform_real_distribution<double> uy(lo.y(), hi.y());
    std::vector<Vec2> seeds;
    seeds.reserve(static_cast<std::size_t>(count));
    while (static_cast<int>(seeds.size()) < count) {
        const Vec2 p(ux(rng), uy(rng));
        if (domain.contains(p))
            seeds.push_back(p);
    }
    return seeds;
}

std::vector<Vec2> honeycomb_seeds(int n, const Domain& domain)
{
    Vec2 lo = domain.corners[0], hi = domain.corners[0];
    for (const Vec2& c : domain.corners) {
        lo = lo.cwiseMin(c);
        hi = hi.cwiseMax(c);
    }
    const double width = hi.x() - lo.x();
    const double height = hi.y() - lo.y();
    const double dx = width / n;
    const int rows = std::max(1, static_cast<int>(std::lround(height / (dx * std::sqrt(3.0) / 2.0))));
    const double dy = height / rows;
    const double tol = 1e-12 * domain_diameter(domain);

    std::vector<Vec2> seeds;
    for (int j = 0; j < rows; ++j) {
        const bool shifted = (j % 2) == 1;
        const int count = shifted ? n : n + 1;
        for (int i = 0; i < count; ++i) {
            const Vec2 p(lo.x() + (i + (shifted ? 0.5 : 0.0)) * dx, lo.y() + (j + 0.5) * dy);
            if (domain.contains(p, tol))
                seeds.push_back(p);
        }
    }
    return seeds;
}

struct VertexPool {
    double tol;
    std::vector<Vec2> points;
    std::unordered_map<long long, std::vector<int>> buckets;

    static long long key(long long i, long long j) { return i * 73856093LL ^ j * 19349663LL; }

    int insert(const Vec2& p)
    {
        const auto bi = static_cast<long long>(std::floor(p.x() / tol));
        const auto bj = static_cast<long long>(std::floor(p.y() / tol));
        for (long long di = -1; di <= 1; ++di)
            for (long long dj = -1; dj <= 1; ++dj) {
                auto it = buckets.find(key(bi + di, bj + dj));
                if (it == buckets.end())
                    continue;
                for (int id : it->second)
                    if ((points[static_cast<std::size_t>(id)] - p).norm() <= tol)
                        return id;
            }
        const int id = static_cast<int>(points.size());
        points.push_back(p);
        buckets[key(bi, bj)].push_back(id);
        return id;
    }
};

void drop_repeats(std::vector<int>& loop)
{
    std::vector<int> out;
    out.reserve(loop.size());
    for (int id : loop)
        if (out.empty() || out.back() != id)
            out.push_back(id);
    while (out.size() > 1 && out.front() == out.back())
        out.pop_back();
    loop = std::move(out);
}

// Bit mask of the domain sides a vertex lies on.
unsigned boundary_sides(const Vec2& p, const Domain& domain, double tol)
{
    unsigned mask = 0;
    const std::size_t n = domain.corners.size();
    for (std::size_t k = 0; k < n; ++k) {
        const Vec2& a = domain.corners[k];
        const Vec2 d = domain.corners[(k + 1) % n] - a;
        const double dist = std::abs(d.x() * (p - a).y() - d.y() * (p - a).x()) / d.norm();
        if (dist <= tol)
            mask |= 1u << k;
    }
    return mask;
}

int collapse_short_edges(std::vector<Vec2>& points, std::vector<std::vector<int>>& cells, const Domain& domain,
                         double threshold, double tol)
{
    int collapsed = 0;
    for (int pass = 0; pass < 16; ++pass) {
        struct Candidate {
            double length;
            int a, b;
        };
        std::vector<Candidate> short_edges;
        for (const auto& loop : cells)
            for (std::size_t i = 0; i < loop.size(); ++i) {
                const int a = loop[i], b = loop[(i + 1) % loop.size()];
                const double len = (points[static_cast<std::size_t>(a)] - points[static_cast<std::size_t>(b)]).norm();
                if (len < threshold)
                    short_edges.push_back({len, std::min(a, b), std::max(a, b)});
            }
        std::sort(short_edges.begin(), short_edges.end(), [](const Candidate& x, const Candidate& y) {
            return std::tie(x.length, x.a, x.b) < std::tie(y.length, y.a, y.b);
        });
        short_edges.erase(std::unique(short_edges.begin(), short_edges.end(),
                                      [](const Candidate& x, const Candidate& y) { return x.a == y.a && x.b == y.b; }),
                          short_edges.end());
        if (short_edges.empty())
            break;

        std::vector<std::vector<int>> incident(points.size());
        for (std::size_t c = 0; c < cells.size(); ++c)
            for (int id : cells[c])
                incident[static_cast<std::size_t>(id)].push_back(static_cast<int>(c));
        std::vector<int> size(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c)
            size[c] = static_cast<int>(cells[c].size());

        std::vector<int> remap(points.size());
        std::iota(remap.begin(), remap.end(), 0);
        std::vector<bool> touched(points.size(), false);
        bool merged_any = false;
        for (const Candidate& cand : short_edges) {
            const auto a = static_cast<std::size_t>(cand.a), b = static_cast<std::size_t>(cand.b);
            if (touched[a] || touched[b])
                continue;
            const unsigned ma = boundary_sides(points[a], domain, tol);
            const unsigned mb = boundary_sides(points[b], domain, tol);
            const bool corner_a = std::popcount(ma) > 1, corner_b = std::popcount(mb) > 1;
            Vec2 target;
            if (corner_a && corner_b)
                continue;
            if (corner_a)
                target = points[a];
            else if (corner_b)
                target = points[b];
            else if (ma && mb) {
                if (ma != mb)
                    continue;
                target = 0.5 * (points[a] + points[b]);
            } else if (ma)
                target = points[a];
            else if (mb)
                target = points[b];
            else
                target = 0.5 * (points[a] + points[b]);

            // Cells holding both endpoints lose a vertex and must keep three.
            bool ok = true;
            std::vector<int> shared;
            for (int c : incident[a])
                if (std::find(incident[b].begin(), incident[b].end(), c) != incident[b].end())
                    shared.push_back(c);
            for (int c : shared)
                ok = ok && size[static_cast<std::size_t>(c)] >= 4;
            if (!ok)
                continue;
            for (int c : shared)
                --size[static_cast<std::size_t>(c)];
            points[a] = target;
            remap[b] = static_cast<int>(a);
            touched[a] = touched[b] = true;
            merged_any = true;
            ++collapsed;
        }
        if (!merged_any)
            break;
        for (auto& loop : cells) {
            for (int& id : loop)
                id = remap[static_cast<std::size_t>(id)];
            drop_repeats(loop);
        }
    }
    return collapsed;
}

PolyMesh voronoi_mesh(std::span<const Vec2> seeds, const Domain& domain, const GeneratorOptions& opt, MeshInfo info)
{
    const auto regions = clipped_voronoi(seeds, domain);
    const double diam = domain_diameter(domain);
    const double tol = 1e-9 * diam;

    VertexPool pool{tol, {}, {}};
    std::vector<std::vector<int>> cells;
    cells.reserve(regions.size());
    for (const auto& region : regions) {
        std::vector<int> loop;
        loop.reserve(region.size());
        for (const Vec2& p : region)
            loop.push_back(pool.insert(p));
        drop_repeats(loop);
        if (loop.size() < 3)
            throw MeshError("degenerate Voronoi cell after clipping");
        cells.push_back(std::move(loop));
    }

    std::vector<Vec2> points = std::move(pool.points);
    if (opt.collapse_ratio > 0.0) {
        const double spacing = std::sqrt(domain.area() / static_cast<double>(seeds.size()));
        info.collapsed_edges = collapse_short_edges(points, cells, domain, opt.collapse_ratio * spacing, tol);
    }

    // Compact away vertices orphaned by merging, keeping first-use order.
    std::vector<int> renumber(points.size(), -1);
    std::vector<Vec2> used;
    for (auto& loop : cells)
        for (int& id : loop) {
            auto& slot = renumber[static_cast<std::size_t>(id)];
            if (slot < 0) {
                slot = static_cast<int>(used.size());
                used.push_back(points[static_cast<std::size_t>(id)]);
            }
            id = slot;
        }

    PolyMesh mesh = PolyMesh::build(std::move(used), std::move(cells), std::move(info));

    // Every boundary edge must lie on a domain side; anything else is a crack.
    for (const Edge& e : mesh.edges())
        if (e.is_boundary()) {
            const unsigned m0 = boundary_sides(mesh.vertex(e.v[0]), domain, 1e3 * tol);
            const unsigned m1 = boundary_sides(mesh.vertex(e.v[1]), domain, 1e3 * tol);
            if ((m0 & m1) == 0)
                throw MeshError("degenerate Voronoi cell after clipping (interior crack)");
        }
    return mesh;
}

} // namespace

std::string_view to_string(MeshKind kind)
{
    for (const auto& [name, k] : kKindNames)
        if (k == kind)
            return name;
    return "unknown";
}

MeshKind parse_mesh_kind(std::string_view name)
{
    for (const auto& [n, k] : kKindNames)
        if (n == name)
            return k;
    throw ValidationError("unknown mesh kind '" + std::string(name) + "'");
}

std::vector<std::vector<Vec2>> clipped_voronoi(std::span<const Vec2> seeds, const Domain& domain)
{
    const std::size_t n = seeds.size();
    if (n == 0)
        return {};
    Vec2 lo = domain.corners[0], hi = domain.corners[0];
    for (const Vec2& c : domain.corners) {
        lo = lo.cwiseMin(c);
        hi = hi.cwiseMax(c);
    }
    const double cell = std::sqrt(domain.area() / static_cast<double>(n));
    const int nx = std::max(1, static_cast<int>(std::ceil((hi.x() - lo.x()) / cell)));
    const int ny = std::max(1, static_cast<int>(std::ceil((hi.y() - lo.y()) / cell)));
    auto bucket_of = [&](const Vec2& p) {
        const int i = std::clamp(static_cast<int>((p.x() - lo.x()) / cell), 0, nx - 1);
        const int j = std::clamp(static_cast<int>((p.y() - lo.y()) / cell), 0, ny - 1);
        return std::pair{i, j};
    };
    std::vector<std::vector<int>> buckets(static_cast<std::size_t>(nx * ny));
    for (std::size_t s = 0; s < n; ++s) {
        const auto [i, j] = bucket_of(seeds[s]);
        buckets[static_cast<std::size_t>(j * nx + i)].push_back(static_cast<int>(s));
    }

    std::vector<std::vector<Vec2>> regions(n);
    for (std::size_t s = 0; s < n; ++s) {
        const Vec2& site = seeds[s];
        std::vector<Vec2> poly = domain.corners;
        const auto [ci, cj] = bucket_of(site);
        for (int ring = 0; ring <= std::max(nx, ny); ++ring) {
            for (int j = cj - ring; j <= cj + ring; ++j) {
                if (j < 0 || j >= ny)
                    continue;
                for (int i = ci - ring; i <= ci + ring; ++i) {
                    if (i < 0 || i >= nx)
                        continue;
                    if (std::max(std::abs(i - ci), std::abs(j - cj)) != ring)
                        continue;
                    for (int other : buckets[static_cast<std::size_t>(j * nx + i)]) {
                        if (static_cast<std::size_t>(other) == s)
                            continue;
                        const Vec2& q = seeds[static_cast<std::size_t>(other)];
                        poly = clip_half_plane(poly, 0.5 * (site + q), q - site);
                    }
                }
            }
            double reach = 0.0;
            for (const Vec2& p : poly)
                reach = std::max(reach, (p - site).norm());
            if (ring * cell >= 2.0 * reach)
                break;
        }
        regions[s] = std::move(poly);
    }
    return regions;
}

PolyMesh generate_mesh(MeshKind kind, int resolution, const Domain& domain, const GeneratorOptions& options)
{
    if (resolution < 1)
        throw ValidationError("mesh resolution must be >= 1");
    if (domain.corners.size() < 3 || !(domain.area() > 0.0))
        throw ValidationError("domain must be a counterclockwise convex polygon");

    MeshInfo info;
    info.kind = std::string(to_string(kind));
    info.resolution = resolution;

    switch (kind) {
    case MeshKind::quad_structured:
        return grid_mesh(resolution, domain, false, false, options, kind);
    case MeshKind::tri_structured:
        return grid_mesh(resolution, domain, true, false, options, kind);
    case MeshKind::quad_unstructured:
        return grid_mesh(resolution, domain, false, true, options, kind);
    case MeshKind::tri_unstructured:
        return grid_mesh(resolution, domain, true, true, options, kind);
    case MeshKind::hex_structured: {
        const auto seeds = honeycomb_seeds(resolution, domain);
        return voronoi_mesh(seeds, domain, options, info);
    }
    case MeshKind::poly_voronoi_random: {
        std::mt19937_64 rng(options.seed);
        info.seed = options.seed;
        const auto seeds = random_seeds(resolution * resolution, domain, rng);
        return voronoi_mesh(seeds, domain, options, info);
    }
    case MeshKind::poly_voronoi_cvt: {
        std::mt19937_64 rng(options.seed);
        info.seed = options.seed;
        auto seeds = random_seeds(resolution * resolution, domain, rng);
        const double spacing = std::sqrt(domain.area() / static_cast<double>(seeds.size()));
        double last_move = std::numeric_limits<double>::infinity();
        for (int it = 0; it < options.lloyd_iterations; ++it) {
            const auto regions = clipped_voronoi(seeds, domain);
            last_move = 0.0;
            for (std::size_t s = 0; s < seeds.size(); ++s) {
                const Vec2 c = polygon_metrics(regions[s]).centroid;
                last_move = std::max(last_move, (c - seeds[s]).norm());
                seeds[s] = c;
            }
        }
        info.lloyd_iterations = options.lloyd_iterations;
        info.lloyd_converged = last_move <= options.lloyd_tolerance * spacing;
        return voronoi_mesh(seeds, domain, options, info);
    }
    }
    throw ValidationError("unhandled mesh kind");
}

} // namespace vemhr
