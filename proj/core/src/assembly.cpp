#include "vemhr/assembly.hpp"

#include "vemhr/error.hpp"
#include "vemhr/mesh_io.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace vemhr {

GlobalSystem assemble(const PolyMesh& mesh, std::span<const IsotropicMaterial> materials, const LoadCase& load,
                      const AssemblyOptions& options)
{
    if (materials.empty() || (materials.size() != 1 && materials.size() != static_cast<std::size_t>(mesh.num_cells())))
        throw ValidationError("need one material or one per cell");

    GlobalSystem sys{DofMap(mesh), {}, {}, {}};
    const DofMap& dm = sys.dofs;
    sys.rhs = Eigen::VectorXd::Zero(dm.size());

    std::vector<Eigen::Triplet<double>> triplets;
    std::size_t estimate = 0;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const auto n = 3 * mesh.cell_edges(c).size();
        estimate += n * n + 6 * n;
    }
    triplets.reserve(estimate);

    // Cells are visited in index order, so the summation order of shared
    // entries is fixed and the assembled matrix is reproducible.
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const LocalElement el(mesh, c);
        const IsotropicMaterial& mat = materials.size() == 1 ? materials[0] : materials[static_cast<std::size_t>(c)];
        const Eigen::MatrixXd a = el.stiffness(mat, options.stabilization, options.stabilization_scale);
        const LocalElement::RowMap b = el.coupling();
        if (!a.allFinite() || !b.allFinite())
            throw SolverError("non-finite local matrix in cell " + std::to_string(c));

        std::vector<int> global(static_cast<std::size_t>(el.num_dofs()));
        for (int i = 0; i < el.num_edges(); ++i)
            for (int k = 0; k < 3; ++k)
                global[static_cast<std::size_t>(3 * i + k)] = dm.edge_dof(el.edges()[static_cast<std::size_t>(i)].edge, k);

        for (int i = 0; i < el.num_dofs(); ++i)
            for (int j = 0; j < el.num_dofs(); ++j)
                triplets.emplace_back(global[static_cast<std::size_t>(i)], global[static_cast<std::size_t>(j)], a(i, j));
        for (int r = 0; r < 3; ++r)
            for (int k = 0; k < el.num_dofs(); ++k) {
                const double v = b(r, k);
                if (v == 0.0)
                    continue;
                triplets.emplace_back(dm.cell_dof(c, r), global[static_cast<std::size_t>(k)], v);
                triplets.emplace_back(global[static_cast<std::size_t>(k)], dm.cell_dof(c, r), v);
            }

        if (load.body_force) {
            const Eigen::Vector3d f = el.load(load.body_force, options.load_degree);
            if (!f.allFinite())
                throw SolverError("non-finite load in cell " + std::to_string(c));
            for (int r = 0; r < 3; ++r)
                sys.rhs(dm.cell_dof(c, r)) -= f(r);
        }
    }
    sys.matrix.resize(dm.size(), dm.size());
    sys.matrix.setFromTriplets(triplets.begin(), triplets.end());

    const EdgeRule rule = edge_rule(options.boundary_degree);
    for (int e = 0; e < mesh.num_edges(); ++e) {
        const Edge& edge = mesh.edge(e);
        if (!edge.is_boundary())
            continue;
        if (!load.boundary)
            throw ValidationError("no boundary conditions supplied");
        const auto bc = load.boundary(edge);
        if (!bc)
            throw ValidationError("boundary edge " + std::to_string(e) + " has no boundary condition");
        if (bc->kind == BoundaryKind::traction) {
            apply_essential_traction(sys, mesh, e, bc->value, options.boundary_degree);
        } else if (bc->value) {
            const int sign = edge.plus_cell >= 0 ? 1 : -1;
            const Eigen::Vector3d g = dirichlet_boundary_term(edge, sign, bc->value, rule);
            for (int k = 0; k < 3; ++k)
                sys.rhs(dm.edge_dof(e, k)) += g(k);
        }
    }
    return sys;
}

void apply_essential_traction(GlobalSystem& system, const PolyMesh& mesh, int edge, const VectorField& traction,
                              int degree)
{
    const Edge& e = mesh.edge(edge);
    if (!e.is_boundary())
        throw ValidationError("essential traction on interior edge " + std::to_string(edge));
    EdgeTraction t;
    if (traction) {
        // tau n_e = sign * (outward traction)
        const double sign = e.plus_cell >= 0 ? 1.0 : -1.0;
        t = edge_moments(e, [&](const Vec2& x) { return Vec2(sign * traction(x)); }, e.midpoint, edge_rule(degree));
    }
    system.constraints[system.dofs.edge_dof(edge, 0)] = t.c.x();
    system.constraints[system.dofs.edge_dof(edge, 1)] = t.c.y();
    system.constraints[system.dofs.edge_dof(edge, 2)] = t.d;
}

Solution solve(const GlobalSystem& system, double tolerance)
{
    const int n = system.dofs.size();
    std::vector<char> fixed(static_cast<std::size_t>(n), 0);
    Eigen::VectorXd rhs = system.rhs;
    for (const auto& [dof, value] : system.constraints) {
        fixed[static_cast<std::size_t>(dof)] = 1;
        rhs(dof) = value;
    }

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(system.matrix.nonZeros()) + system.constraints.size());
    for (int col = 0; col < system.matrix.outerSize(); ++col)
        for (Eigen::SparseMatrix<double>::InnerIterator it(system.matrix, col); it; ++it) {
            const auto row = static_cast<int>(it.row());
            if (fixed[static_cast<std::size_t>(row)])
                continue;
            if (fixed[static_cast<std::size_t>(col)]) {
                rhs(row) -= it.value() * system.constraints.at(col);
                continue;
            }
            triplets.emplace_back(row, col, it.value());
        }
    for (const auto& [dof, value] : system.constraints)
        triplets.emplace_back(dof, dof, 1.0);

    Eigen::SparseMatrix<double> reduced(n, n);
    reduced.setFromTriplets(triplets.begin(), triplets.end());
    reduced.makeCompressed();

    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(reduced);
    lu.factorize(reduced);
    if (lu.info() != Eigen::Success)
        throw SolverError("singular matrix: " + lu.lastErrorMessage());
    const Eigen::VectorXd x = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !x.allFinite())
        throw SolverError("sparse solve failed (singular or ill-posed system)");

    const double rhs_norm = rhs.norm();
    const double res_norm = (reduced * x - rhs).norm();
    Solution sol;
    sol.report.num_dofs = n;
    sol.report.num_constrained = static_cast<int>(system.constraints.size());
    sol.report.relative_residual = rhs_norm > 0.0 ? res_norm / rhs_norm : res_norm;
    if (!(sol.report.relative_residual <= tolerance))
        throw SolverError("relative residual " + format_double(sol.report.relative_residual) +
                          " above tolerance " + format_double(tolerance));

    const DofMap& dm = system.dofs;
    sol.stress.resize(static_cast<std::size_t>(dm.num_edges));
    for (int e = 0; e < dm.num_edges; ++e)
        sol.stress[static_cast<std::size_t>(e)] = {{x(dm.edge_dof(e, 0)), x(dm.edge_dof(e, 1))}, x(dm.edge_dof(e, 2))};
    sol.displacement.resize(static_cast<std::size_t>(dm.num_cells));
    for (int c = 0; c < dm.num_cells; ++c)
        sol.displacement[static_cast<std::size_t>(c)] = {{x(dm.cell_dof(c, 0)), x(dm.cell_dof(c, 1))}, x(dm.cell_dof(c, 2))};
    return sol;
}

double inf_sup_constant(const PolyMesh& mesh, const IsotropicMaterial& material, const AssemblyOptions& options,
                        int max_dofs)
{
    const DofMap dm(mesh);
    if (dm.size() > max_dofs)
        throw ValidationError("inf-sup estimate limited to " + std::to_string(max_dofs) + " unknowns");
    LoadCase load;
    load.boundary = [](const Edge&) { return BoundaryCondition{BoundaryKind::displacement, {}}; };
    const GlobalSystem sys = assemble(mesh, std::span(&material, 1), load, options);
    const Eigen::MatrixXd full(sys.matrix);
    const int ns = dm.num_stress();
    const int nu = dm.size() - ns;
    const Eigen::MatrixXd a = full.topLeftCorner(ns, ns);
    const Eigen::MatrixXd b = full.bottomLeftCorner(nu, ns);

    Eigen::VectorXd m_inv_sqrt(nu);
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const CellGeometry& g = mesh.geometry(c);
        m_inv_sqrt.segment<3>(3 * c) << 1.0 / std::sqrt(g.area), 1.0 / std::sqrt(g.area),
            1.0 / std::sqrt(g.second_moment);
    }
    const Eigen::MatrixXd bs = m_inv_sqrt.asDiagonal() * b;
    const Eigen::MatrixXd x = a + bs.transpose() * bs;
    const Eigen::LLT<Eigen::MatrixXd> llt(x);
    if (llt.info() != Eigen::Success)
        throw SolverError("stress norm matrix is not positive definite");
    const Eigen::MatrixXd s = bs * llt.solve(bs.transpose());
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, eig.eigenvalues()(0)));
}

void write_solution(std::ostream& out, const PolyMesh& mesh, const Solution& solution)
{
    out << "vemhr-solution v1\n";
    out << "mesh_checksum " << std::hex << mesh.checksum() << std::dec << '\n';
    out << "num_dofs " << solution.report.num_dofs << '\n';
    out << "num_constrained " << solution.report.num_constrained << '\n';
    out << "relative_residual " << format_double(solution.report.relative_residual) << '\n';
    out << "edges " << solution.stress.size() << '\n';
    for (const EdgeTraction& t : solution.stress)
        out << format_double(t.c.x()) << ' ' << format_double(t.c.y()) << ' ' << format_double(t.d) << '\n';
    out << "cells " << solution.displacement.size() << '\n';
    for (const RigidMotion& r : solution.displacement)
        out << format_double(r.a.x()) << ' ' << format_double(r.a.y()) << ' ' << format_double(r.b) << '\n';
}

void write_solution(const std::filesystem::path& path, const PolyMesh& mesh, const Solution& solution)
{
    std::ofstream out(path);
    if (!out)
        throw ValidationError("cannot open '" + path.string() + "' for writing");
    write_solution(out, mesh, solution);
}

Solution read_solution(std::istream& in, const PolyMesh& mesh)
{
    auto expect = [&in](const std::string& word) {
        std::string token;
        if (!(in >> token) || token != word)
            throw ValidationError("solution file: expected '" + word + "'");
    };
    std::string header;
    std::getline(in, header);
    if (header != "vemhr-solution v1")
        throw ValidationError("solution file: bad header");
    expect("mesh_checksum");
    std::string checksum;
    in >> checksum;
    std::ostringstream ours;
    ours << std::hex << mesh.checksum();
    if (checksum != ours.str())
        throw ValidationError("solution file: mesh checksum mismatch");

    Solution sol;
    auto read_double = [&in]() {
        std::string s;
        in >> s;
        return std::stod(s);
    };
    expect("num_dofs");
    in >> sol.report.num_dofs;
    expect("num_constrained");
    in >> sol.report.num_constrained;
    expect("relative_residual");
    sol.report.relative_residual = read_double();
    std::size_t ne = 0, nc = 0;
    expect("edges");
    in >> ne;
    if (ne != static_cast<std::size_t>(mesh.num_edges()))
        throw ValidationError("solution file: edge count mismatch");
    sol.stress.resize(ne);
    for (auto& t : sol.stress) {
        t.c.x() = read_double();
        t.c.y() = read_double();
        t.d = read_double();
    }
    expect("cells");
    in >> nc;
    if (nc != static_cast<std::size_t>(mesh.num_cells()))
        throw ValidationError("solution file: cell count mismatch");
    sol.displacement.resize(nc);
    for (auto& r : sol.displacement) {
        r.a.x() = read_double();
        r.a.y() = read_double();
        r.b = read_double();
    }
    if (!in)
        throw ValidationError("solution file: truncated");
    return sol;
}

} // namespace vemhr
