#include "vemhr/runner.hpp"

#include "vemhr/error.hpp"
#include "vemhr/mesh_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace vemhr {

namespace {

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& key, const std::string& v)
{
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw ValidationError("config key '" + key + "': not a number: '" + v + "'");
    return x;
}

long long parse_int(const std::string& key, const std::string& v)
{
    long long x = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw ValidationError("config key '" + key + "': not an integer: '" + v + "'");
    return x;
}

std::vector<std::string> split_list(const std::string& v)
{
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
        if (auto t = trim(item); !t.empty())
            out.push_back(t);
    return out;
}

std::string fmt(double x) { return format_double(x); }

} // namespace

void RunConfig::validate() const
{
    if (levels.empty())
        throw ValidationError("no mesh levels given");
    for (int n : levels)
        if (n < 1)
            throw ValidationError("mesh levels must be positive");
    if (kinds.empty())
        throw ValidationError("no mesh kinds given");
    if (!(nu > -1.0 && nu < 0.5))
        throw ValidationError("Poisson ratio must lie in (-1, 0.5)");
    for (double v : cook_nus)
        if (!(v > -1.0 && v < 0.5))
            throw ValidationError("Poisson ratio must lie in (-1, 0.5)");
    for (int d : {load_degree, boundary_degree, error_degree})
        if (d < 1 || d > 20)
            throw ValidationError("quadrature degree must lie in [1, 20]");
    if (!(solver_tolerance > 0.0))
        throw ValidationError("solver tolerance must be positive");
    if (!(stabilization_scale > 0.0) || !std::isfinite(stabilization_scale))
        throw ValidationError("stabilization scale must be positive");
    if (rate_window < 2)
        throw ValidationError("rate window must be at least 2");
    if (cook_reference_level < 0)
        throw ValidationError("reference level must be non-negative");
}

AssemblyOptions RunConfig::assembly_options() const
{
    return {stabilization, stabilization_scale, load_degree, boundary_degree};
}

GeneratorOptions RunConfig::generator_options() const
{
    GeneratorOptions g;
    g.seed = seed;
    return g;
}

void apply_config(RunConfig& c, const std::map<std::string, std::string>& entries)
{
    for (const auto& [key, value] : entries) {
        if (key == "problem")
            c.problem = value;
        else if (key == "nu")
            c.nu = parse_double(key, value);
        else if (key == "lambda")
            c.lambda = parse_double(key, value);
        else if (key == "mu")
            c.mu = parse_double(key, value);
        else if (key == "kinds" || key == "kind") {
            c.kinds.clear();
            for (const auto& k : split_list(value))
                c.kinds.push_back(parse_mesh_kind(k));
        } else if (key == "levels") {
            c.levels.clear();
            for (const auto& k : split_list(value))
                c.levels.push_back(static_cast<int>(parse_int(key, k)));
        } else if (key == "stab")
            c.stabilization = parse_stabilization(value);
        else if (key == "stab_scale")
            c.stabilization_scale = parse_double(key, value);
        else if (key == "load_degree")
            c.load_degree = static_cast<int>(parse_int(key, value));
        else if (key == "boundary_degree")
            c.boundary_degree = static_cast<int>(parse_int(key, value));
        else if (key == "error_degree")
            c.error_degree = static_cast<int>(parse_int(key, value));
        else if (key == "tolerance")
            c.solver_tolerance = parse_double(key, value);
        else if (key == "seed")
            c.seed = static_cast<std::uint64_t>(parse_int(key, value));
        else if (key == "rate_window")
            c.rate_window = static_cast<int>(parse_int(key, value));
        else if (key == "cook_nus") {
            c.cook_nus.clear();
            for (const auto& k : split_list(value))
                c.cook_nus.push_back(parse_double(key, k));
        } else if (key == "reference_level")
            c.cook_reference_level = static_cast<int>(parse_int(key, value));
        else
            throw ValidationError("unknown config key '" + key + "'");
    }
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open config file " + path.string());
    std::map<std::string, std::string> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        const std::string t = trim(line);
        if (t.empty())
            continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
        out[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
    }
    return out;
}

void write_config(std::ostream& out, const RunConfig& c)
{
    auto join = [](const auto& v, auto f) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i)
            s += (i ? "," : "") + f(v[i]);
        return s;
    };
    out << "problem=" << c.problem << '\n';
    out << "nu=" << fmt(c.nu) << '\n';
    if (c.lambda)
        out << "lambda=" << fmt(*c.lambda) << '\n';
    if (c.mu)
        out << "mu=" << fmt(*c.mu) << '\n';
    out << "kinds=" << join(c.kinds, [](MeshKind k) { return std::string(to_string(k)); }) << '\n';
    out << "levels=" << join(c.levels, [](int n) { return std::to_string(n); }) << '\n';
    out << "stab=" << to_string(c.stabilization) << '\n';
    out << "stab_scale=" << fmt(c.stabilization_scale) << '\n';
    out << "load_degree=" << c.load_degree << '\n';
    out << "boundary_degree=" << c.boundary_degree << '\n';
    out << "error_degree=" << c.error_degree << '\n';
    out << "tolerance=" << fmt(c.solver_tolerance) << '\n';
    out << "seed=" << c.seed << '\n';
    out << "rate_window=" << c.rate_window << '\n';
    out << "cook_nus=" << join(c.cook_nus, fmt) << '\n';
    out << "reference_level=" << c.cook_reference_level << '\n';
}

Solution solve_problem(const ProblemSpec& problem, const PolyMesh& mesh, const RunConfig& config)
{
    const IsotropicMaterial materials[] = {problem.material};
    const GlobalSystem sys = assemble(mesh, materials, problem.load_case(), config.assembly_options());
    return solve(sys, config.solver_tolerance);
}

ConvergenceResult run_convergence(const ProblemSpec& problem, MeshKind kind, const RunConfig& config)
{
    config.validate();
    if (!problem.exact)
        throw ValidationError("problem '" + problem.name + "' has no exact solution");
    const ExactSolution& ex = *problem.exact;

    ConvergenceResult result;
    result.kind = kind;
    result.levels.reserve(config.levels.size());
    const double consistency = check_consistency(problem).worst();
    if (consistency > 1e-8)
        throw ValidationError("exact solution of '" + problem.name + "' fails the finite-difference check (" +
                              fmt(consistency) + ")");

    std::vector<ErrorReport> ok;
    for (int n : config.levels) {
        LevelResult lr;
        lr.level = n;
        lr.consistency = consistency;
        try {
            const PolyMesh mesh = generate_mesh(kind, n, problem.domain, config.generator_options());
            const Solution sol = solve_problem(problem, mesh, config);
            lr.report = sol.report;
            lr.errors.level = n;
            lr.errors.h_bar = mesh.mean_edge_length();
            lr.errors.n_dof = sol.report.num_dofs;
            lr.errors.e_sigma =
                error_sigma(mesh, sol.stress, ex.sigma, problem.material.kappa(), config.error_degree);
            lr.errors.e_sigma_div = error_div(mesh, sol.stress, ex.div_sigma, config.error_degree);
            lr.errors.e_u = error_u(mesh, sol.displacement, ex.u, config.error_degree);
            lr.equilibrium = equilibrium_residual(mesh, sol.stress, problem.body_force, config.error_degree);
            lr.ok = true;
            ok.push_back(lr.errors);
        } catch (const Error& e) {
            lr.failure = e.what();
        }
        result.levels.push_back(std::move(lr));
    }

    if (ok.size() >= 3) {
        result.table = convergence_rates(std::move(ok), config.rate_window);
    } else {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        result.table.levels = std::move(ok);
        result.table.window = config.rate_window;
        result.table.rate_sigma = result.table.rate_div = result.table.rate_u = nan;
    }
    return result;
}

VtkCellData vtk_data(const PolyMesh& mesh, const Solution& solution, const IsotropicMaterial& material)
{
    VtkCellData d;
    d.displacement.reserve(mesh.num_cells());
    for (const RigidMotion& r : solution.displacement)
        d.displacement.push_back(r.a);
    d.von_mises = von_mises_field(mesh, solution.stress, material);
    d.mean_stress = cell_mean_stress(mesh, solution.stress);
    return d;
}

CookResult run_cook(const RunConfig& config, const std::optional<std::filesystem::path>& vtk_path)
{
    config.validate();
    CookResult result;
    bool exported = false;
    for (double nu : config.cook_nus) {
        const ProblemSpec problem = problem_cook(nu);
        if (config.cook_reference_level > 0) {
            const PolyMesh mesh = generate_mesh(MeshKind::quad_structured, config.cook_reference_level, problem.domain,
                                                config.generator_options());
            const Solution sol = solve_problem(problem, mesh, config);
            result.reference[nu] = probe_displacement(mesh, sol.displacement, *problem.probe_point).y();
        }
        for (MeshKind kind : config.kinds) {
            for (std::size_t i = 0; i < config.levels.size(); ++i) {
                const int n = config.levels[i];
                const PolyMesh mesh = generate_mesh(kind, n, problem.domain, config.generator_options());
                const Solution sol = solve_problem(problem, mesh, config);
                const Vec2 u = probe_displacement(mesh, sol.displacement, *problem.probe_point);
                result.rows.push_back({kind, nu, n, sol.report.num_dofs, u.y()});
                if (vtk_path && !exported && i + 1 == config.levels.size()) {
                    write_vtk(*vtk_path, mesh, vtk_data(mesh, sol, problem.material));
                    exported = true;
                }
            }
        }
    }
    return result;
}

void write_cook_csv(std::ostream& out, const CookResult& result)
{
    out << "kind,nu,level,n_dof,v_A\n";
    for (const CookRow& r : result.rows)
        out << to_string(r.kind) << ',' << fmt(r.nu) << ',' << r.level << ',' << r.n_dof << ',' << fmt(r.v_a) << '\n';
}

} // namespace vemhr
