#pragma once

#include "vemhr/assembly.hpp"
#include "vemhr/fields.hpp"
#include "vemhr/geometry.hpp"
#include "vemhr/material.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace vemhr {

/// (sum_e kappa |e| int_e |(sigma - sigma_h) n|^2)^(1/2) over all mesh edges.
double error_sigma(const PolyMesh& mesh, std::span<const EdgeTraction> stress, const TensorField& sigma_exact,
                   double kappa, int degree = 6);

/// (sum_E int_E |div sigma - div sigma_h|^2)^(1/2).
double error_div(const PolyMesh& mesh, std::span<const EdgeTraction> stress, const VectorField& div_sigma_exact,
                 int degree = 6);

/// (sum_E int_E |u - u_h|^2)^(1/2).
double error_u(const PolyMesh& mesh, std::span<const RigidMotion> displacement, const VectorField& u_exact,
               int degree = 6);

/// L2(E) projection of a vector field onto the rigid motions of a cell.
RigidMotion project_rigid(const PolyMesh& mesh, int cell, const VectorField& f, int degree = 6);

struct EquilibriumCheck {
    double max_cell_residual = 0.0; ///< max_E || div sigma_h + P_RM f ||_{L2(E)}
    double load_norm = 0.0;         ///< || f ||_{L2(Omega)}
};

/// Discrete equilibrium div sigma_h = -P_RM f, cell by cell.
EquilibriumCheck equilibrium_residual(const PolyMesh& mesh, std::span<const EdgeTraction> stress,
                                      const VectorField& body_force, int degree = 6);

/// Cell means Pi_E sigma_h.
std::vector<SymTensor2> cell_mean_stress(const PolyMesh& mesh, std::span<const EdgeTraction> stress);

std::vector<double> von_mises_field(const PolyMesh& mesh, std::span<const EdgeTraction> stress,
                                    const IsotropicMaterial& material);

/// u_h at the centroid of the cell whose centroid is nearest to `point`.
Vec2 probe_displacement(const PolyMesh& mesh, std::span<const RigidMotion> displacement, const Vec2& point);

struct ErrorReport {
    int level = 0;
    double h_bar = 0.0;
    int n_dof = 0;
    double e_sigma = 0.0;
    double e_sigma_div = 0.0;
    double e_u = 0.0;
};

struct RateTable {
    std::vector<ErrorReport> levels;
    int window = 3;
    double rate_sigma = 0.0;
    double rate_div = 0.0;
    double rate_u = 0.0;
    /// Levels left out of a fit because the error was exactly zero.
    int excluded_sigma = 0, excluded_div = 0, excluded_u = 0;
};

/// Least-squares slope of log(error) against log(h) over the last `window`
/// points. Zero errors are dropped and counted in `excluded`; fewer than two
/// usable points give NaN.
double fit_slope(std::span<const double> h, std::span<const double> errors, int window, int* excluded = nullptr);

/// Requires at least three levels.
RateTable convergence_rates(std::vector<ErrorReport> levels, int window = 3);

/// CSV with header level,h_bar,n_dof,E_sigma,E_sigma_div,E_u,rate_sigma,rate_div,rate_u.
/// Rates compare each level with the previous one; the first row leaves them empty.
void write_convergence_csv(std::ostream& out, const RateTable& table);

struct VtkCellData {
    std::vector<Vec2> displacement;
    std::vector<double> von_mises;
    std::vector<SymTensor2> mean_stress;
};

/// Legacy-VTK ASCII polydata with per-cell displacement, von Mises stress and
/// projected stress components.
void write_vtk(std::ostream& out, const PolyMesh& mesh, const VtkCellData& data);
void write_vtk(const std::filesystem::path& path, const PolyMesh& mesh, const VtkCellData& data);

} // namespace vemhr
