#include "vemhr/assembly.hpp"
#include "vemhr/local_element.hpp"
#include "vemhr/mesh_gen.hpp"
#include "vemhr/postproc.hpp"
#include "vemhr/problems.hpp"
#include "vemhr/runner.hpp"

#include "../support/oracles.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace vemhr;
using namespace vemhr::oracle;

namespace {

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;

    void check(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            notes.push_back("FAILED " + what);
        }
    }
    void note(const std::string& s) { notes.push_back(s); }
};

std::string fmt(const char* f, auto... args)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::vector<MeshKind> all_kinds()
{
    std::vector<MeshKind> k;
    for (int i = 0; i <= static_cast<int>(MeshKind::poly_voronoi_cvt); ++i)
        k.push_back(static_cast<MeshKind>(i));
    return k;
}

bool in_window(double r) { return std::isfinite(r) && r >= 0.8 && r <= 1.2; }

const std::vector<int> kLevels{8, 16, 32, 64};

RunConfig study_config(const std::string& problem)
{
    RunConfig c;
    c.problem = problem;
    c.levels = kLevels;
    return c;
}

/// Equilibrium results gathered from every solved benchmark level.
struct EquilibriumLog {
    double worst_relative = 0.0;
    double worst_test_a = 0.0;
    int solves = 0;
    int failed_levels = 0;

    void add(const std::string& problem, const ConvergenceResult& r)
    {
        for (const LevelResult& l : r.levels) {
            if (!l.ok) {
                ++failed_levels;
                continue;
            }
            ++solves;
            if (problem == "test-a")
                worst_test_a = std::max(worst_test_a, l.equilibrium.max_cell_residual);
            else
                worst_relative =
                    std::max(worst_relative, l.equilibrium.max_cell_residual / l.equilibrium.load_norm);
        }
    }
};

Outcome patch_test()
{
    Outcome o;
    const ProblemSpec p = problem_patch();
    for (MeshKind kind : all_kinds()) {
        const PolyMesh m = generate_mesh(kind, 4, unit_square());
        const Solution sol = solve_problem(p, m, RunConfig{});
        const auto exact = interpolate_global(m, p.exact->sigma);
        double s_err = 0.0, s_scale = 0.0;
        for (int e = 0; e < m.num_edges(); ++e) {
            const EdgeTraction& a = sol.stress[static_cast<std::size_t>(e)];
            const EdgeTraction& b = exact[static_cast<std::size_t>(e)];
            s_err = std::max({s_err, (a.c - b.c).cwiseAbs().maxCoeff(), std::abs(a.d - b.d)});
            s_scale = std::max(s_scale, b.c.cwiseAbs().maxCoeff());
        }
        double u_err = 0.0, u_scale = 0.0;
        for (int c = 0; c < m.num_cells(); ++c) {
            const RigidMotion pr = project_rigid(m, c, p.exact->u);
            const RigidMotion& uh = sol.displacement[static_cast<std::size_t>(c)];
            u_err = std::max(u_err, (uh.a - pr.a).cwiseAbs().maxCoeff() + std::abs(uh.b - pr.b));
            u_scale = std::max(u_scale, pr.a.cwiseAbs().maxCoeff());
        }
        const double rs = s_err / s_scale, ru = u_err / u_scale;
        o.note(fmt("%-20s stress %.2e  displacement %.2e", std::string(to_string(kind)).c_str(), rs, ru));
        o.check(rs < 1e-9 && ru < 1e-9, std::string(to_string(kind)));
    }
    return o;
}

std::string rates_line(const ConvergenceResult& r)
{
    return fmt("%-20s sigma %.3f  div %.3f  u %.3f", std::string(to_string(r.kind)).c_str(), r.table.rate_sigma,
               r.table.rate_div, r.table.rate_u);
}

Outcome test_a(EquilibriumLog& eq)
{
    Outcome o;
    const ProblemSpec p = problem_test_a();
    const RunConfig cfg = study_config("test-a");
    for (MeshKind kind : all_kinds()) {
        const ConvergenceResult r = run_convergence(p, kind, cfg);
        eq.add("test-a", r);
        o.note(rates_line(r));
        const std::string k(to_string(kind));
        o.check(in_window(r.table.rate_sigma), k + " rate_sigma");
        o.check(in_window(r.table.rate_u), k + " rate_u");
        for (const LevelResult& l : r.levels) {
            o.check(l.ok, k + " level " + std::to_string(l.level) + " " + l.failure);
            o.check(l.errors.e_sigma_div < 1e-9, k + fmt(" E_sigma_div %.2e", l.errors.e_sigma_div));
        }
    }
    return o;
}

Outcome test_b(EquilibriumLog& eq)
{
    Outcome o;
    const ProblemSpec p = problem_test_b();
    const RunConfig cfg = study_config("test-b");
    for (MeshKind kind : all_kinds()) {
        const ConvergenceResult r = run_convergence(p, kind, cfg);
        eq.add("test-b", r);
        o.note(rates_line(r));
        const std::string k(to_string(kind));
        o.check(in_window(r.table.rate_sigma), k + " rate_sigma");
        o.check(in_window(r.table.rate_div), k + " rate_div");
        o.check(in_window(r.table.rate_u), k + " rate_u");
        for (const LevelResult& l : r.levels)
            o.check(l.ok, k + " level " + std::to_string(l.level) + " " + l.failure);
    }
    return o;
}

Outcome incompressible(EquilibriumLog& eq)
{
    Outcome o;
    const ProblemSpec stiff = problem_test_incompressible();
    const ProblemSpec soft = problem_test_incompressible(1.0, 0.5);
    const RunConfig cfg = study_config("test-inc");
    double worst_ratio = 1.0;
    for (MeshKind kind : all_kinds()) {
        const ConvergenceResult r = run_convergence(stiff, kind, cfg);
        const ConvergenceResult r1 = run_convergence(soft, kind, cfg);
        eq.add("test-inc", r);
        eq.add("test-inc", r1);
        o.note(rates_line(r));
        const std::string k(to_string(kind));
        o.check(in_window(r.table.rate_sigma), k + " rate_sigma");
        o.check(in_window(r.table.rate_div), k + " rate_div");
        o.check(in_window(r.table.rate_u), k + " rate_u");
        for (std::size_t i = 0; i < r.levels.size(); ++i) {
            const LevelResult& a = r.levels[i];
            const LevelResult& b = r1.levels[i];
            o.check(a.ok && b.ok, k + " level " + std::to_string(a.level));
            for (auto [x, y] : {std::pair{a.errors.e_sigma, b.errors.e_sigma},
                                std::pair{a.errors.e_sigma_div, b.errors.e_sigma_div},
                                std::pair{a.errors.e_u, b.errors.e_u}}) {
                const double ratio = x / y;
                worst_ratio = std::max({worst_ratio, ratio, 1.0 / ratio});
                o.check(ratio <= 10.0 && ratio >= 0.1, k + fmt(" error ratio %.3g at level %d", ratio, a.level));
            }
        }
    }
    o.note(fmt("largest error ratio lambda=1e5 vs lambda=1: %.3f", worst_ratio));
    return o;
}

Outcome equilibrium(const EquilibriumLog& eq)
{
    Outcome o;
    o.note(fmt("%d solves; max residual/|f| %.2e; Test a max residual %.2e", eq.solves, eq.worst_relative,
               eq.worst_test_a));
    o.check(eq.solves > 0, "no solves recorded");
    o.check(eq.failed_levels == 0, "failed levels present");
    o.check(eq.worst_relative <= 1e-8, "relative equilibrium");
    o.check(eq.worst_test_a <= 1e-10, "Test a equilibrium");
    return o;
}

Outcome cook()
{
    Outcome o;
    RunConfig cfg;
    cfg.problem = "cook";
    cfg.kinds = {MeshKind::quad_structured, MeshKind::poly_voronoi_cvt, MeshKind::poly_voronoi_random};
    cfg.levels = {8, 16, 32, 64, 96};
    cfg.cook_reference_level = 128;
    const CookResult r = run_cook(cfg);
    for (const auto& [nu, ref] : r.reference) {
        o.note(fmt("nu=%.6f reference v_A %.5f", nu, ref));
        const double tol = nu < 0.4 ? 0.01 : 0.05;
        for (MeshKind kind : cfg.kinds) {
            std::vector<double> v;
            for (const CookRow& row : r.rows)
                if (row.kind == kind && row.nu == nu)
                    v.push_back(row.v_a);
            if (v.size() < 2) {
                o.check(false, "missing Cook levels");
                continue;
            }
            const double dist = std::abs(v.back() - ref) / ref;
            const double step = std::abs(v.back() - v[v.size() - 2]) / std::abs(v.back());
            std::ostringstream seq;
            for (double x : v)
                seq << ' ' << fmt("%.4f", x);
            o.note(fmt("  %-20s", std::string(to_string(kind)).c_str()) + seq.str() +
                   fmt("  | to reference %.2f%%  last step %.2f%%", 100 * dist, 100 * step));
            const std::string k = std::string(to_string(kind)) + fmt(" nu=%.6f", nu);
            o.check(dist < tol, k + " distance to reference");
            o.check(step < 0.01, k + " plateau");
        }
    }
    return o;
}

Outcome interpolation()
{
    Outcome o;
    const ProblemSpec a = problem_test_a();
    const ProblemSpec b = problem_test_b();
    const double kappa = a.material.kappa();
    double worst_commute = 0.0;
    for (MeshKind kind : all_kinds()) {
        std::vector<double> h, err;
        for (int n : kLevels) {
            const PolyMesh m = generate_mesh(kind, n, unit_square());
            h.push_back(m.mean_edge_length());
            err.push_back(error_sigma(m, interpolate_global(m, a.exact->sigma), a.exact->sigma, kappa));
            if (n > 16)
                continue;
            for (const ProblemSpec* p : {&a, &b}) {
                const auto global = interpolate_global(m, p->exact->sigma, 12);
                for (int c = 0; c < m.num_cells(); ++c) {
                    const LocalElement el(m, c);
                    const Eigen::Vector3d lhs = el.coupling() * el.gather(global);
                    const Eigen::Vector3d rhs = el.load(p->exact->div_sigma, 12);
                    const double d = (lhs - rhs).cwiseAbs().maxCoeff() / std::max(1.0, rhs.cwiseAbs().maxCoeff());
                    worst_commute = std::max(worst_commute, d);
                }
            }
        }
        const double slope = fit_slope(h, err, 3);
        o.note(fmt("%-20s interpolation slope %.3f", std::string(to_string(kind)).c_str(), slope));
        o.check(in_window(slope), std::string(to_string(kind)) + " slope");
    }
    o.note(fmt("commuting moments max deviation %.2e", worst_commute));
    o.check(worst_commute < 1e-9, "commuting moments");
    return o;
}

/// Unisolvence and compatibility on random polygons with random DOFs.
Outcome properties()
{
    Outcome o;
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst_compat = 0.0, worst_recover = 0.0, worst_sv = 1.0;
    for (int k = 0; k < 1000; ++k) {
        const auto loop = k % 3 == 0 ? random_star_polygon(rng, 4 + k % 9) : random_convex_polygon(rng);
        const PolyMesh m = single_cell(loop);
        const LocalElement el(m, 0);
        const int n = el.num_dofs();
        Eigen::VectorXd dofs(n);
        for (int i = 0; i < n; ++i)
            dofs(i) = u(rng);
        const Vec2 xc = m.geometry(0).centroid;
        const auto ces = m.cell_edges(0);

        // Moment matrix of the outward tractions and the compatibility sums.
        Eigen::MatrixXd mom = Eigen::MatrixXd::Zero(n, n);
        Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
        double magnitude = 0.0;
        for (std::size_t i = 0; i < ces.size(); ++i) {
            const Edge& e = m.edge(ces[i].edge);
            const int ii = static_cast<int>(i);
            auto moments = [&](const Eigen::VectorXd& v) {
                return Eigen::Vector3d(e.length * simpson([&](double s) {
                    const Vec2 t = ces[i].sign * (Vec2(v(3 * ii), v(3 * ii + 1)) + v(3 * ii + 2) * s * e.normal);
                    return Eigen::Vector3d(t.x(), t.y(), t.dot(perp(e.point(s) - xc)));
                }));
            };
            for (int j = 3 * ii; j < 3 * ii + 3; ++j)
                mom.block<3, 1>(3 * ii, j) = moments(Eigen::VectorXd::Unit(n, j));
            rhs += moments(dofs);
            magnitude += e.length * dofs.segment<3>(3 * ii).cwiseAbs().sum() *
                         (1.0 + (e.midpoint - xc).norm() + e.length);

            auto traction = [&](const Vec2& x) {
                const double s = (x - e.midpoint).dot(e.tangent) / e.length;
                return Vec2(Vec2(dofs(3 * ii), dofs(3 * ii + 1)) + dofs(3 * ii + 2) * s * e.normal);
            };
            const EdgeTraction t = edge_moments(e, traction, e.midpoint, edge_rule(2));
            const double scale = dofs.segment<3>(3 * ii).cwiseAbs().maxCoeff();
            worst_recover = std::max(worst_recover, std::max({std::abs(t.c.x() - dofs(3 * ii)),
                                                              std::abs(t.c.y() - dofs(3 * ii + 1)),
                                                              std::abs(t.d - dofs(3 * ii + 2))}) /
                                                        scale);
        }
        const Eigen::VectorXd sv = mom.jacobiSvd().singularValues();
        worst_sv = std::min(worst_sv, sv(n - 1) / sv(0));

        const Moments g = green_moments(loop);
        const RigidMotion div = el.divergence(dofs);
        const Eigen::Vector3d lhs(g.area * div.a.x(), g.area * div.a.y(), (g.ixx + g.iyy) * div.b);
        const double c1 = (lhs - rhs).cwiseAbs().maxCoeff() / magnitude;
        const double c2 = (el.coupling() * dofs - rhs).cwiseAbs().maxCoeff() / magnitude;
        worst_compat = std::max({worst_compat, c1, c2});
    }
    o.note(fmt("compatibility %.2e  DOF recovery %.2e  min relative singular value %.2e", worst_compat,
               worst_recover, worst_sv));
    o.check(worst_compat < 1e-12, "compatibility");
    o.check(worst_recover < 1e-12, "DOF recovery");
    o.check(worst_sv > 1e-12, "moment matrix invertible");
    return o;
}

Outcome determinism()
{
    Outcome o;
    RunConfig cfg;
    cfg.problem = "test-b";
    cfg.levels = {4, 8, 16};
    auto conv = [&](MeshKind kind) {
        std::ostringstream out;
        write_convergence_csv(out, run_convergence(problem_test_b(), kind, cfg).table);
        return out.str();
    };
    for (MeshKind kind : {MeshKind::poly_voronoi_random, MeshKind::poly_voronoi_cvt, MeshKind::quad_unstructured}) {
        const std::string a = conv(kind), b = conv(kind);
        o.check(!a.empty() && a == b, std::string(to_string(kind)) + " convergence CSV differs");
    }
    RunConfig ck;
    ck.problem = "cook";
    ck.kinds = {MeshKind::poly_voronoi_random, MeshKind::poly_voronoi_cvt};
    ck.levels = {4, 8};
    auto cook_csv = [&] {
        std::ostringstream out;
        write_cook_csv(out, run_cook(ck));
        return out.str();
    };
    o.check(cook_csv() == cook_csv(), "Cook CSV differs");
    o.note("convergence and Cook CSVs compared byte for byte");
    return o;
}

} // namespace

int main()
{
    EquilibriumLog eq;
    struct Criterion {
        int id;
        const char* title;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "constant-stress patch test on all mesh kinds", patch_test},
        {3, "Test a convergence rates", [&] { return test_a(eq); }},
        {4, "Test b convergence rates", [&] { return test_b(eq); }},
        {5, "nearly incompressible robustness", [&] { return incompressible(eq); }},
        {2, "discrete equilibrium on every solve", [&] { return equilibrium(eq); }},
        {6, "Cook's membrane plateau", cook},
        {7, "interpolation rate and commuting moments", interpolation},
        {8, "unisolvence and compatibility on 1000 polygons", properties},
        {9, "determinism of CSV outputs", determinism},
    };

    std::vector<std::pair<int, std::string>> verdicts;
    bool all = true;
    for (const Criterion& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.check(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << "[" << c.id << "] " << c.title << fmt(" (%.1f s)", secs) << '\n';
        for (const std::string& n : o.notes)
            std::cout << "    " << n << '\n';
        std::cout.flush();
        verdicts.emplace_back(c.id, std::string(o.pass ? "PASS" : "FAIL") + " criterion " + std::to_string(c.id) +
                                        ": " + c.title);
        all = all && o.pass;
    }
    std::sort(verdicts.begin(), verdicts.end());
    std::cout << '\n';
    for (const auto& [id, line] : verdicts)
        std::cout << line << '\n';
    return all ? 0 : 1;
}
