#pragma once

#include "vemhr/assembly.hpp"
#include "vemhr/mesh_gen.hpp"
#include "vemhr/postproc.hpp"
#include "vemhr/problems.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace vemhr {

struct RunConfig {
    std::string problem = "test-b";
    double nu = 1.0 / 3.0;
    std::optional<double> lambda;
    std::optional<double> mu;
    std::vector<MeshKind> kinds{MeshKind::quad_structured};
    std::vector<int> levels{4, 8, 16, 32};
    Stabilization stabilization = Stabilization::diameter;
    double stabilization_scale = AssemblyOptions{}.stabilization_scale;
    int load_degree = 6;
    int boundary_degree = 6;
    int error_degree = 6;
    double solver_tolerance = 1e-10;
    std::uint64_t seed = GeneratorOptions{}.seed;
    int rate_window = 3;
    std::vector<double> cook_nus{1.0 / 3.0, 0.499995};
    int cook_reference_level = 0; ///< 0 skips the overkill reference

    /// Throws ValidationError on inconsistent settings.
    void validate() const;
    [[nodiscard]] AssemblyOptions assembly_options() const;
    [[nodiscard]] GeneratorOptions generator_options() const;
};

/// key=value lines; '#' starts a comment. Unknown keys throw ValidationError.
void apply_config(RunConfig& config, const std::map<std::string, std::string>& entries);
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);
void write_config(std::ostream& out, const RunConfig& config);

/// Assemble and solve one problem on one mesh.
Solution solve_problem(const ProblemSpec& problem, const PolyMesh& mesh, const RunConfig& config);

struct LevelResult {
    int level = 0;
    bool ok = false;
    std::string failure;
    ErrorReport errors;
    EquilibriumCheck equilibrium;
    SolveReport report;
    double consistency = 0.0;
};

struct ConvergenceResult {
    MeshKind kind = MeshKind::quad_structured;
    std::vector<LevelResult> levels;
    RateTable table; ///< successful levels only; rates are NaN below three levels
};

/// Solves `problem` on every level of one mesh family. A failing level is
/// recorded and skipped.
ConvergenceResult run_convergence(const ProblemSpec& problem, MeshKind kind, const RunConfig& config);

struct CookRow {
    MeshKind kind = MeshKind::quad_structured;
    double nu = 0.0;
    int level = 0;
    int n_dof = 0;
    double v_a = 0.0;
};

struct CookResult {
    std::vector<CookRow> rows;
    std::map<double, double> reference; ///< nu -> overkill v_A
};

/// Vertical probe displacement at A for each kind, nu and level. When
/// `vtk_path` is set, the finest level of the first kind and nu is exported.
CookResult run_cook(const RunConfig& config, const std::optional<std::filesystem::path>& vtk_path = std::nullopt);

/// kind,nu,level,n_dof,v_A
void write_cook_csv(std::ostream& out, const CookResult& result);

/// VTK payload for a solved problem.
VtkCellData vtk_data(const PolyMesh& mesh, const Solution& solution, const IsotropicMaterial& material);

} // namespace vemhr
