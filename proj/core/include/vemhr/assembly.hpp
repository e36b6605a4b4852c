#pragma once

#include "vemhr/fields.hpp"
#include "vemhr/geometry.hpp"
#include "vemhr/local_element.hpp"
#include "vemhr/material.hpp"

#include <Eigen/SparseCore>

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace vemhr {

/// Global numbering: three stress unknowns (c_x, c_y, d) per edge first, then
/// three displacement unknowns (a_x, a_y, b) per cell.
struct DofMap {
    int num_edges = 0;
    int num_cells = 0;

    explicit DofMap(const PolyMesh& mesh) : num_edges(mesh.num_edges()), num_cells(mesh.num_cells()) {}

    [[nodiscard]] int edge_dof(int edge, int k) const { return 3 * edge + k; }
    [[nodiscard]] int cell_dof(int cell, int r) const { return 3 * num_edges + 3 * cell + r; }
    [[nodiscard]] int num_stress() const { return 3 * num_edges; }
    [[nodiscard]] int size() const { return 3 * (num_edges + num_cells); }
};

enum class BoundaryKind {
    displacement, ///< natural: prescribed u = g enters the right-hand side
    traction,     ///< essential: the edge's stress DOFs are fixed
};

struct BoundaryCondition {
    BoundaryKind kind = BoundaryKind::displacement;
    /// g for displacement edges, outward traction sigma n_out for traction
    /// edges. An empty function means zero.
    VectorField value;
};

/// Returns the condition of a boundary edge, or nullopt if it is not covered.
using BoundaryClassifier = std::function<std::optional<BoundaryCondition>(const Edge&)>;

struct LoadCase {
    VectorField body_force; ///< f in -div sigma = f; empty means zero
    BoundaryClassifier boundary;
};

struct AssemblyOptions {
    Stabilization stabilization = Stabilization::diameter;
    /// Multiplier on kappa_E = tr(D)/2 in the stabilization term.
    double stabilization_scale = 0.25;
    int load_degree = 6;
    int boundary_degree = 6;
};

/// Saddle-point system [[A, B^T], [B, 0]] [sigma; u] = [G; -F] plus the
/// essential constraints, which `solve` eliminates symmetrically.
struct GlobalSystem {
    DofMap dofs;
    Eigen::SparseMatrix<double> matrix;
    Eigen::VectorXd rhs;
    std::map<int, double> constraints;
};

/// Assembles the global system. `materials` holds either one material or one
/// per cell. Traction edges are constrained through apply_essential_traction.
/// Throws ValidationError for uncovered boundary edges and SolverError for
/// non-finite local matrices.
GlobalSystem assemble(const PolyMesh& mesh, std::span<const IsotropicMaterial> materials, const LoadCase& load,
                      const AssemblyOptions& options = {});

/// Fixes the three stress DOFs of a boundary edge to the edge moments of the
/// prescribed outward traction.
void apply_essential_traction(GlobalSystem& system, const PolyMesh& mesh, int edge, const VectorField& traction,
                              int degree = 6);

struct SolveReport {
    double relative_residual = 0.0;
    int num_dofs = 0;
    int num_constrained = 0;
};

struct Solution {
    std::vector<EdgeTraction> stress;      ///< per edge
    std::vector<RigidMotion> displacement; ///< per cell, anchored at its centroid
    SolveReport report;
};

/// Sparse LU with partial pivoting on the constrained system. Throws
/// SolverError on singular matrices or a relative residual above `tolerance`.
Solution solve(const GlobalSystem& system, double tolerance = 1e-10);

/// Discrete inf-sup constant of the coupling on a mesh with displacement
/// conditions everywhere: the square root of the smallest eigenvalue of
/// M^{-1/2} B X^{-1} B^T M^{-1/2}, where X = A + B^T M^{-1} B is the stress norm
/// and M the L2 Gram matrix of the cell rigid motions. Dense; throws
/// ValidationError above `max_dofs` unknowns.
double inf_sup_constant(const PolyMesh& mesh, const IsotropicMaterial& material, const AssemblyOptions& options = {},
                        int max_dofs = 8000);

/// Versioned text dump of a solution (`vemhr-solution v1`).
void write_solution(std::ostream& out, const PolyMesh& mesh, const Solution& solution);
void write_solution(const std::filesystem::path& path, const PolyMesh& mesh, const Solution& solution);
Solution read_solution(std::istream& in, const PolyMesh& mesh);

} // namespace vemhr
