#include "vemhr/postproc.hpp"

#include "vemhr/error.hpp"
#include "vemhr/local_element.hpp"
#include "vemhr/mesh_io.hpp"
#include "vemhr/quadrature.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

namespace vemhr {

double error_sigma(const PolyMesh& mesh, std::span<const EdgeTraction> stress, const TensorField& sigma_exact,
                   double kappa, int degree)
{
    const EdgeRule rule = edge_rule(degree);
    double sum = 0.0;
    for (int e = 0; e < mesh.num_edges(); ++e) {
        const Edge& edge = mesh.edge(e);
        const EdgeTraction& t = stress[static_cast<std::size_t>(e)];
        const double local = integrate_edge(edge, rule, [&](double s) {
            const Vec2 diff = sigma_exact(edge.point(s)) * edge.normal - (t.c + t.d * s * edge.normal);
            return diff.squaredNorm();
        });
        sum += kappa * edge.length * local;
    }
    return std::sqrt(sum);
}

double error_div(const PolyMesh& mesh, std::span<const EdgeTraction> stress, const VectorField& div_sigma_exact,
                 int degree)
{
    double sum = 0.0;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const LocalElement el(mesh, c);
        const RigidMotion div_h = el.divergence(el.gather(stress));
        const Vec2 xc = el.geometry().centroid;
        const PolygonRule rule = polygon_rule(mesh.cell_points(c), xc, degree);
        sum += rule.integrate([&](const Vec2& x) {
            const Vec2 exact = div_sigma_exact ? div_sigma_exact(x) : Vec2::Zero();
            return (exact - div_h(x, xc)).squaredNorm();
        });
    }
    return std::sqrt(sum);
}

double error_u(const PolyMesh& mesh, std::span<const RigidMotion> displacement, const VectorField& u_exact, int degree)
{
    double sum = 0.0;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const Vec2 xc = mesh.geometry(c).centroid;
        const RigidMotion& uh = displacement[static_cast<std::size_t>(c)];
        const PolygonRule rule = polygon_rule(mesh.cell_points(c), xc, degree);
        sum += rule.integrate([&](const Vec2& x) { return (u_exact(x) - uh(x, xc)).squaredNorm(); });
    }
    return std::sqrt(sum);
}

RigidMotion project_rigid(const PolyMesh& mesh, int cell, const VectorField& f, int degree)
{
    const CellGeometry& g = mesh.geometry(cell);
    const PolygonRule rule = polygon_rule(mesh.cell_points(cell), g.centroid, degree);
    Vec2 mean = Vec2::Zero();
    double rot = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const Vec2 fv = f(rule.points[q]);
        mean += rule.weights[q] * fv;
        rot += rule.weights[q] * fv.dot(perp(rule.points[q] - g.centroid));
    }
    return {mean / g.area, rot / g.second_moment};
}

EquilibriumCheck equilibrium_residual(const PolyMesh& mesh, std::span<const EdgeTraction> stress,
                                      const VectorField& body_force, int degree)
{
    EquilibriumCheck check;
    double load_sq = 0.0;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const LocalElement el(mesh, c);
        const CellGeometry& g = el.geometry();
        RigidMotion r = el.divergence(el.gather(stress));
        if (body_force) {
            const RigidMotion pf = project_rigid(mesh, c, body_force, degree);
            r.a += pf.a;
            r.b += pf.b;
            const PolygonRule rule = polygon_rule(mesh.cell_points(c), g.centroid, degree);
            load_sq += rule.integrate([&](const Vec2& x) { return body_force(x).squaredNorm(); });
        }
        // RM basis is L2(E)-orthogonal: ||a + b (x - x_C)^perp||^2 = |E| |a|^2 + m_E b^2.
        const double norm = std::sqrt(g.area * r.a.squaredNorm() + g.second_moment * r.b * r.b);
        check.max_cell_residual = std::max(check.max_cell_residual, norm);
    }
    check.load_norm = std::sqrt(load_sq);
    return check;
}

std::vector<SymTensor2> cell_mean_stress(const PolyMesh& mesh, std::span<const EdgeTraction> stress)
{
    std::vector<SymTensor2> out;
    out.reserve(static_cast<std::size_t>(mesh.num_cells()));
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const LocalElement el(mesh, c);
        out.push_back(el.mean_stress(el.gather(stress)));
    }
    return out;
}

std::vector<double> von_mises_field(const PolyMesh& mesh, std::span<const EdgeTraction> stress,
                                    const IsotropicMaterial& material)
{
    std::vector<double> out;
    for (const SymTensor2& s : cell_mean_stress(mesh, stress))
        out.push_back(von_mises_plane_strain(s, material));
    return out;
}

Vec2 probe_displacement(const PolyMesh& mesh, std::span<const RigidMotion> displacement, const Vec2& point)
{
    if (mesh.num_cells() == 0)
        throw ValidationError("probe on an empty mesh");
    int best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const double d = (mesh.geometry(c).centroid - point).squaredNorm();
        if (d < best_dist) {
            best_dist = d;
            best = c;
        }
    }
    const Vec2 xc = mesh.geometry(best).centroid;
    return displacement[static_cast<std::size_t>(best)](xc, xc);
}

double fit_slope(std::span<const double> h, std::span<const double> errors, int window, int* excluded)
{
    const std::size_t n = h.size();
    const std::size_t first = window > 0 && static_cast<std::size_t>(window) < n ? n - static_cast<std::size_t>(window) : 0;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int count = 0, dropped = 0;
    for (std::size_t i = first; i < n; ++i) {
        if (!(errors[i] > 0.0) || !(h[i] > 0.0)) {
            ++dropped;
            continue;
        }
        const double x = std::log(h[i]);
        const double y = std::log(errors[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++count;
    }
    if (excluded)
        *excluded = dropped;
    if (count < 2)
        return std::numeric_limits<double>::quiet_NaN();
    const double denom = count * sxx - sx * sx;
    return (count * sxy - sx * sy) / denom;
}

RateTable convergence_rates(std::vector<ErrorReport> levels, int window)
{
    if (levels.size() < 3)
        throw ValidationError("rate fit needs at least 3 levels");
    RateTable t;
    t.window = window;
    t.levels = std::move(levels);
    std::vector<double> h, es, ed, eu;
    for (const ErrorReport& r : t.levels) {
        h.push_back(r.h_bar);
        es.push_back(r.e_sigma);
        ed.push_back(r.e_sigma_div);
        eu.push_back(r.e_u);
    }
    t.rate_sigma = fit_slope(h, es, window, &t.excluded_sigma);
    t.rate_div = fit_slope(h, ed, window, &t.excluded_div);
    t.rate_u = fit_slope(h, eu, window, &t.excluded_u);
    return t;
}

void write_convergence_csv(std::ostream& out, const RateTable& table)
{
    out << "level,h_bar,n_dof,E_sigma,E_sigma_div,E_u,rate_sigma,rate_div,rate_u\n";
    auto rate = [](double e0, double e1, double h0, double h1) -> std::string {
        if (!(e0 > 0.0) || !(e1 > 0.0))
            return "";
        return format_double(std::log(e1 / e0) / std::log(h1 / h0));
    };
    for (std::size_t i = 0; i < table.levels.size(); ++i) {
        const ErrorReport& r = table.levels[i];
        out << r.level << ',' << format_double(r.h_bar) << ',' << r.n_dof << ',' << format_double(r.e_sigma) << ','
            << format_double(r.e_sigma_div) << ',' << format_double(r.e_u);
        if (i == 0) {
            out << ",,,\n";
            continue;
        }
        const ErrorReport& p = table.levels[i - 1];
        out << ',' << rate(p.e_sigma, r.e_sigma, p.h_bar, r.h_bar) << ','
            << rate(p.e_sigma_div, r.e_sigma_div, p.h_bar, r.h_bar) << ',' << rate(p.e_u, r.e_u, p.h_bar, r.h_bar)
            << '\n';
    }
}

void write_vtk(std::ostream& out, const PolyMesh& mesh, const VtkCellData& data)
{
    const auto nc = static_cast<std::size_t>(mesh.num_cells());
    if (data.displacement.size() != nc || data.von_mises.size() != nc || data.mean_stress.size() != nc)
        throw ValidationError("VTK cell data size does not match the mesh");
    out << "# vtk DataFile Version 3.0\nvemhr solution\nASCII\nDATASET POLYDATA\n";
    out << "POINTS " << mesh.num_vertices() << " double\n";
    for (const Vec2& v : mesh.vertices())
        out << format_double(v.x()) << ' ' << format_double(v.y()) << " 0\n";
    std::size_t size = 0;
    for (const auto& loop : mesh.cells())
        size += loop.size() + 1;
    out << "POLYGONS " << nc << ' ' << size << '\n';
    for (const auto& loop : mesh.cells()) {
        out << loop.size();
        for (int id : loop)
            out << ' ' << id;
        out << '\n';
    }
    out << "CELL_DATA " << nc << '\n';
    out << "VECTORS displacement double\n";
    for (const Vec2& u : data.displacement)
        out << format_double(u.x()) << ' ' << format_double(u.y()) << " 0\n";
    auto scalars = [&](const char* name, auto&& get) {
        out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
        for (std::size_t c = 0; c < nc; ++c)
            out << format_double(get(c)) << '\n';
    };
    scalars("von_mises", [&](std::size_t c) { return data.von_mises[c]; });
    scalars("sigma_xx", [&](std::size_t c) { return data.mean_stress[c].xx; });
    scalars("sigma_yy", [&](std::size_t c) { return data.mean_stress[c].yy; });
    scalars("sigma_xy", [&](std::size_t c) { return data.mean_stress[c].xy; });
}

void write_vtk(const std::filesystem::path& path, const PolyMesh& mesh, const VtkCellData& data)
{
    std::ofstream out(path);
    if (!out)
        throw ValidationError("cannot open '" + path.string() + "' for writing");
    write_vtk(out, mesh, data);
}

} // namespace vemhr
