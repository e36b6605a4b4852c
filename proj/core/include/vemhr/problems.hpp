#pragma once

#include "vemhr/assembly.hpp"
#include "vemhr/fields.hpp"
#include "vemhr/geometry.hpp"
#include "vemhr/material.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace vemhr {

/// Closed-form solution bundle used for error evaluation.
struct ExactSolution {
    VectorField u;
    TensorField sigma;
    VectorField div_sigma;
};

struct ProblemSpec {
    std::string name;
    Domain domain;
    IsotropicMaterial material;
    VectorField body_force; ///< empty means f = 0
    BoundaryClassifier boundary;
    std::optional<ExactSolution> exact;
    std::optional<Vec2> probe_point;

    [[nodiscard]] LoadCase load_case() const { return {body_force, boundary}; }
};

/// Cubic harmonic-type displacement, f = 0, non-homogeneous Dirichlet data.
ProblemSpec problem_test_a();

/// u1 = u2 = sin(pi x) sin(pi y), homogeneous Dirichlet data.
ProblemSpec problem_test_b(double lambda = 1.0, double mu = 1.0);

/// Divergence-free trigonometric displacement, homogeneous Dirichlet data.
ProblemSpec problem_test_incompressible(double lambda = 1e5, double mu = 0.5);

/// Constant-stress patch problem: u = (x, 0) with matching Dirichlet data.
ProblemSpec problem_patch(double lambda = 1.0, double mu = 1.0);

/// Cook's membrane with E = 70: clamped left edge, traction-free top and
/// bottom, tangential traction q = 6.25 on the right edge. Probe at (48, 60).
ProblemSpec problem_cook(double nu);

inline constexpr double kCookYoung = 70.0;
inline constexpr double kCookTraction = 6.25;

/// Builds a problem from its CLI id: test-a, test-b, test-inc, cook, patch.
/// `lambda`/`mu` override the Lame pair of the manufactured problems;
/// `nu` is used by cook only.
ProblemSpec make_problem(std::string_view id, double nu = 1.0 / 3.0, std::optional<double> lambda = std::nullopt,
                         std::optional<double> mu = std::nullopt);

struct ConsistencyReport {
    double strain_error = 0.0;     ///< max |D sigma - eps_fd(u)| / scale
    double divergence_error = 0.0; ///< max |div sigma - div_fd(sigma)| / scale
    double load_error = 0.0;       ///< max |div sigma + f| / scale
    [[nodiscard]] double worst() const;
};

/// Finite-difference self-consistency oracle for the exact bundle: central
/// differences (step 1e-5) at `samples` random interior points. Errors are
/// relative to the largest sampled magnitude of the compared quantity.
ConsistencyReport check_consistency(const ProblemSpec& problem, int samples = 20, std::uint64_t seed = 7,
                                    double step = 1e-5);

} // namespace vemhr
