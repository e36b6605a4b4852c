#include "vemhr/assembly.hpp"
#include "vemhr/error.hpp"
#include "vemhr/mesh_gen.hpp"
#include "vemhr/mesh_io.hpp"
#include "vemhr/postproc.hpp"
#include "vemhr/problems.hpp"
#include "vemhr/runner.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using namespace vemhr;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;

using Entries = std::map<std::string, std::string>;

/// Flag values collected as strings so they can be overlaid on a config file.
struct Flags {
    Entries given;

    void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help)
    {
        app->add_option_function<std::string>(flag, [this, key](const std::string& v) { given[key] = v; }, help);
    }
};

Entries merged(const std::string& config_path, const Flags& flags)
{
    Entries e = config_path.empty() ? Entries{} : read_config_file(config_path);
    for (const auto& [k, v] : flags.given)
        e[k] = v;
    return e;
}

std::string take(Entries& e, const std::string& key, bool required = true)
{
    auto it = e.find(key);
    if (it == e.end()) {
        if (required)
            throw ValidationError("missing required setting '" + key + "'");
        return {};
    }
    std::string v = it->second;
    e.erase(it);
    return v;
}

int to_int(const std::string& key, const std::string& v)
{
    try {
        std::size_t pos = 0;
        const int n = std::stoi(v, &pos);
        if (pos != v.size())
            throw std::invalid_argument(v);
        return n;
    } catch (const std::logic_error&) {
        throw ValidationError("setting '" + key + "': not an integer: '" + v + "'");
    }
}

Domain parse_domain(const std::string& name)
{
    if (name.empty() || name == "unit-square")
        return unit_square();
    if (name == "cook")
        return cook_domain();
    throw ValidationError("unknown domain '" + name + "'");
}

template <class Writer>
void write_atomically(const fs::path& path, Writer&& writer)
{
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out)
            throw ValidationError("cannot write " + path.string());
        writer(out);
        if (!out)
            throw ValidationError("write failed for " + path.string());
    }
    fs::rename(tmp, path);
}

void write_config_alongside(const fs::path& output, const RunConfig& config)
{
    write_atomically(output.string() + ".cfg", [&](std::ostream& o) { write_config(o, config); });
}

int cmd_mesh_gen(Entries e)
{
    const MeshKind kind = parse_mesh_kind(take(e, "kind"));
    const int n = to_int("n", take(e, "n"));
    const Domain domain = parse_domain(take(e, "domain", false));
    const std::string out = take(e, "out");
    RunConfig config;
    apply_config(config, e);
    const PolyMesh mesh = generate_mesh(kind, n, domain, config.generator_options());
    write_atomically(out, [&](std::ostream& o) { write_mesh(o, mesh); });
    std::cout << "cells " << mesh.num_cells() << " edges " << mesh.num_edges() << " vertices "
              << mesh.num_vertices() << '\n';
    if (!mesh.info().lloyd_converged && kind == MeshKind::poly_voronoi_cvt)
        std::cerr << "warning: Lloyd iteration did not converge\n";
    return 0;
}

int cmd_solve(Entries e)
{
    const std::string mesh_path = take(e, "mesh");
    const std::string out = take(e, "out");
    const std::string vtk = take(e, "vtk", false);
    RunConfig config;
    apply_config(config, e);
    config.validate();
    const ProblemSpec problem = make_problem(config.problem, config.nu, config.lambda, config.mu);
    if (problem.exact) {
        const double c = check_consistency(problem).worst();
        if (c > 1e-8)
            throw ValidationError("exact solution fails the finite-difference check");
    }
    const PolyMesh mesh = read_mesh(fs::path(mesh_path));
    const Solution sol = solve_problem(problem, mesh, config);
    write_atomically(out, [&](std::ostream& o) { write_solution(o, mesh, sol); });
    write_config_alongside(out, config);
    if (!vtk.empty())
        write_atomically(vtk, [&](std::ostream& o) { write_vtk(o, mesh, vtk_data(mesh, sol, problem.material)); });

    std::cout << "dofs " << sol.report.num_dofs << " residual " << sol.report.relative_residual << '\n';
    if (problem.exact) {
        const ExactSolution& ex = *problem.exact;
        std::cout << "E_sigma " << error_sigma(mesh, sol.stress, ex.sigma, problem.material.kappa()) << " E_div "
                  << error_div(mesh, sol.stress, ex.div_sigma) << " E_u " << error_u(mesh, sol.displacement, ex.u)
                  << '\n';
    }
    if (problem.probe_point) {
        const Vec2 u = probe_displacement(mesh, sol.displacement, *problem.probe_point);
        std::cout << "u_A " << u.x() << ' ' << u.y() << '\n';
    }
    return 0;
}

int cmd_convergence(Entries e)
{
    const std::string csv = take(e, "csv");
    RunConfig config;
    apply_config(config, e);
    config.validate();
    if (config.kinds.size() != 1)
        throw ValidationError("convergence takes exactly one mesh kind");
    const ProblemSpec problem = make_problem(config.problem, config.nu, config.lambda, config.mu);
    const ConvergenceResult result = run_convergence(problem, config.kinds.front(), config);

    write_atomically(csv, [&](std::ostream& o) { write_convergence_csv(o, result.table); });
    write_config_alongside(csv, config);

    bool failed = false;
    for (const LevelResult& lr : result.levels) {
        if (!lr.ok) {
            failed = true;
            std::cerr << "level " << lr.level << " failed: " << lr.failure << '\n';
        }
    }
    const RateTable& t = result.table;
    std::cout << "rates sigma " << t.rate_sigma << " div " << t.rate_div << " u " << t.rate_u << '\n';
    return failed ? kExitSolver : 0;
}

int cmd_cook(Entries e)
{
    const std::string csv = take(e, "csv");
    const std::string vtk = take(e, "vtk", false);
    RunConfig config;
    config.problem = "cook";
    config.kinds = {MeshKind::quad_structured, MeshKind::poly_voronoi_cvt, MeshKind::poly_voronoi_random};
    apply_config(config, e);
    config.validate();
    const CookResult result = run_cook(config, vtk.empty() ? std::nullopt : std::optional<fs::path>(vtk));
    write_atomically(csv, [&](std::ostream& o) { write_cook_csv(o, result); });
    write_config_alongside(csv, config);
    for (const auto& [nu, v] : result.reference)
        std::cout << "reference nu=" << nu << " v_A=" << v << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Mixed virtual element solver for 2D elasticity"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "key=value settings file; flags take precedence");

    Flags flags;
    auto* mesh = app.add_subcommand("mesh", "Mesh utilities");
    mesh->require_subcommand(1);
    auto* gen = mesh->add_subcommand("gen", "Generate a mesh");
    flags.add(gen, "--kind", "kind", "Mesh kind");
    flags.add(gen, "--n", "n", "Resolution");
    flags.add(gen, "--domain", "domain", "unit-square or cook");
    flags.add(gen, "--seed", "seed", "RNG seed");
    flags.add(gen, "--out", "out", "Output mesh path");

    auto* solve_cmd = app.add_subcommand("solve", "Solve one problem on a mesh file");
    flags.add(solve_cmd, "--problem", "problem", "test-a, test-b, test-inc, cook or patch");
    flags.add(solve_cmd, "--nu", "nu", "Poisson ratio (cook)");
    flags.add(solve_cmd, "--lambda", "lambda", "Lame lambda override");
    flags.add(solve_cmd, "--mu", "mu", "Lame mu override");
    flags.add(solve_cmd, "--mesh", "mesh", "Input mesh path");
    flags.add(solve_cmd, "--stab", "stab", "stab1 or stab1bis");
    flags.add(solve_cmd, "--stab-scale", "stab_scale", "Stabilization multiplier");
    flags.add(solve_cmd, "--tolerance", "tolerance", "Relative residual tolerance");
    flags.add(solve_cmd, "--out", "out", "Output solution path");
    flags.add(solve_cmd, "--vtk", "vtk", "Optional VTK output");

    auto* conv = app.add_subcommand("convergence", "Convergence study on one mesh family");
    flags.add(conv, "--problem", "problem", "Problem id");
    flags.add(conv, "--kind", "kind", "Mesh kind");
    flags.add(conv, "--levels", "levels", "Comma-separated resolutions");
    flags.add(conv, "--stab", "stab", "stab1 or stab1bis");
    flags.add(conv, "--stab-scale", "stab_scale", "Stabilization multiplier");
    flags.add(conv, "--lambda", "lambda", "Lame lambda override");
    flags.add(conv, "--mu", "mu", "Lame mu override");
    flags.add(conv, "--seed", "seed", "RNG seed");
    flags.add(conv, "--csv", "csv", "Output CSV path");

    auto* cook = app.add_subcommand("cook", "Cook's membrane study");
    flags.add(cook, "--kinds", "kinds", "Comma-separated mesh kinds");
    flags.add(cook, "--levels", "levels", "Comma-separated resolutions");
    flags.add(cook, "--nus", "cook_nus", "Comma-separated Poisson ratios");
    flags.add(cook, "--reference-level", "reference_level", "Overkill quad resolution, 0 to skip");
    flags.add(cook, "--stab", "stab", "stab1 or stab1bis");
    flags.add(cook, "--stab-scale", "stab_scale", "Stabilization multiplier");
    flags.add(cook, "--seed", "seed", "RNG seed");
    flags.add(cook, "--csv", "csv", "Output CSV path");
    flags.add(cook, "--vtk", "vtk", "VTK output for the finest mesh");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        const Entries e = merged(config_path, flags);
        if (gen->parsed())
            return cmd_mesh_gen(e);
        if (solve_cmd->parsed())
            return cmd_solve(e);
        if (conv->parsed())
            return cmd_convergence(e);
        if (cook->parsed())
            return cmd_cook(e);
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return kExitSolver;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return kExitValidation;
}
