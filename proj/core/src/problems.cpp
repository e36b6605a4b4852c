#include "vemhr/problems.hpp"

#include "vemhr/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace vemhr {

namespace {

using std::numbers::pi;

BoundaryClassifier dirichlet_everywhere(VectorField g)
{
    return [g = std::move(g)](const Edge&) -> std::optional<BoundaryCondition> {
        return BoundaryCondition{BoundaryKind::displacement, g};
    };
}

SymTensor2 hooke(double lambda, double mu, const SymTensor2& eps)
{
    const double tr = eps.xx + eps.yy;
    return {2.0 * mu * eps.xx + lambda * tr, 2.0 * mu * eps.yy + lambda * tr, 2.0 * mu * eps.xy};
}

} // namespace

double ConsistencyReport::worst() const { return std::max({strain_error, divergence_error, load_error}); }

ProblemSpec problem_test_a()
{
    const double lambda = 1.0, mu = 1.0;
    ExactSolution ex;
    ex.u = [](const Vec2& p) {
        const double x = p.x(), y = p.y();
        return Vec2(x * x * x - 3.0 * x * y * y, y * y * y - 3.0 * x * x * y);
    };
    ex.sigma = [=](const Vec2& p) {
        const double x = p.x(), y = p.y();
        const SymTensor2 eps{3.0 * x * x - 3.0 * y * y, 3.0 * y * y - 3.0 * x * x, -6.0 * x * y};
        return hooke(lambda, mu, eps);
    };
    ex.div_sigma = [](const Vec2&) { return Vec2(0.0, 0.0); };

    ProblemSpec p{"test-a", unit_square(), IsotropicMaterial::from_lame(lambda, mu), {}, dirichlet_everywhere(ex.u),
                  ex, std::nullopt};
    return p;
}

ProblemSpec problem_test_b(double lambda, double mu)
{
    ExactSolution ex;
    ex.u = [](const Vec2& p) {
        const double s = std::sin(pi * p.x()) * std::sin(pi * p.y());
        return Vec2(s, s);
    };
    ex.sigma = [=](const Vec2& p) {
        const double a = pi * std::cos(pi * p.x()) * std::sin(pi * p.y());
        const double b = pi * std::sin(pi * p.x()) * std::cos(pi * p.y());
        return hooke(lambda, mu, {a, b, 0.5 * (a + b)});
    };
    auto force = [=](const Vec2& p) {
        const double ss = std::sin(pi * p.x()) * std::sin(pi * p.y());
        const double cc = std::cos(pi * p.x()) * std::cos(pi * p.y());
        const double f = -pi * pi * (-(3.0 * mu + lambda) * ss + (mu + lambda) * cc);
        return Vec2(f, f);
    };
    ex.div_sigma = [force](const Vec2& p) { return Vec2(-force(p)); };

    return {"test-b", unit_square(), IsotropicMaterial::from_lame(lambda, mu), force, dirichlet_everywhere({}), ex,
            std::nullopt};
}

ProblemSpec problem_test_incompressible(double lambda, double mu)
{
    ExactSolution ex;
    ex.u = [](const Vec2& p) {
        const double sx = std::sin(2.0 * pi * p.x()), cx = std::cos(2.0 * pi * p.x());
        const double sy = std::sin(2.0 * pi * p.y()), cy = std::cos(2.0 * pi * p.y());
        return Vec2(0.5 * sx * sx * sy * cy, -0.5 * sy * sy * sx * cx);
    };
    ex.sigma = [=](const Vec2& p) {
        const double X = 2.0 * pi * p.x(), Y = 2.0 * pi * p.y();
        const double e = 0.5 * pi * std::sin(2.0 * X) * std::sin(2.0 * Y);
        const double sx = std::sin(X), sy = std::sin(Y);
        const double shear = 0.5 * pi * (sx * sx * std::cos(2.0 * Y) - sy * sy * std::cos(2.0 * X));
        return hooke(lambda, mu, {e, -e, shear});
    };
    ex.div_sigma = [=](const Vec2& p) {
        const double X = 2.0 * pi * p.x(), Y = 2.0 * pi * p.y();
        const double sx = std::sin(X), sy = std::sin(Y);
        return Vec2(2.0 * mu * pi * pi * std::sin(2.0 * Y) * (1.0 - 4.0 * sx * sx),
                    -2.0 * mu * pi * pi * std::sin(2.0 * X) * (1.0 - 4.0 * sy * sy));
    };
    auto force = [div = ex.div_sigma](const Vec2& p) { return Vec2(-div(p)); };

    return {"test-inc", unit_square(), IsotropicMaterial::from_lame(lambda, mu), force, dirichlet_everywhere({}), ex,
            std::nullopt};
}

ProblemSpec problem_patch(double lambda, double mu)
{
    ExactSolution ex;
    ex.u = [](const Vec2& p) { return Vec2(p.x(), 0.0); };
    const SymTensor2 sigma = hooke(lambda, mu, {1.0, 0.0, 0.0});
    ex.sigma = [sigma](const Vec2&) { return sigma; };
    ex.div_sigma = [](const Vec2&) { return Vec2(0.0, 0.0); };
    return {"patch", unit_square(), IsotropicMaterial::from_lame(lambda, mu), {}, dirichlet_everywhere(ex.u), ex,
            std::nullopt};
}

ProblemSpec problem_cook(double nu)
{
    const Domain dom = cook_domain();
    const double tol = 1e-9 * 60.0;
    BoundaryClassifier boundary = [tol](const Edge& e) -> std::optional<BoundaryCondition> {
        const Vec2& m = e.midpoint;
        if (std::abs(m.x()) < tol)
            return BoundaryCondition{BoundaryKind::displacement, {}};
        if (std::abs(m.x() - 48.0) < tol)
            return BoundaryCondition{BoundaryKind::traction, [](const Vec2&) { return Vec2(0.0, kCookTraction); }};
        return BoundaryCondition{BoundaryKind::traction, {}};
    };
    return {"cook", dom, IsotropicMaterial::from_young_poisson_plane_strain(kCookYoung, nu), {}, boundary,
            std::nullopt, Vec2(48.0, 60.0)};
}

ProblemSpec make_problem(std::string_view id, double nu, std::optional<double> lambda, std::optional<double> mu)
{
    if (id == "test-a") {
        if (lambda || mu)
            throw ValidationError("test-a has fixed Lame parameters");
        return problem_test_a();
    }
    if (id == "test-b")
        return problem_test_b(lambda.value_or(1.0), mu.value_or(1.0));
    if (id == "test-inc")
        return problem_test_incompressible(lambda.value_or(1e5), mu.value_or(0.5));
    if (id == "patch")
        return problem_patch(lambda.value_or(1.0), mu.value_or(1.0));
    if (id == "cook")
        return problem_cook(nu);
    throw ValidationError("unknown problem '" + std::string(id) + "'");
}

ConsistencyReport check_consistency(const ProblemSpec& problem, int samples, std::uint64_t seed, double step)
{
    if (!problem.exact)
        throw ValidationError("problem '" + problem.name + "' has no exact solution");
    const ExactSolution& ex = *problem.exact;
    const IsotropicMaterial& mat = problem.material;

    Vec2 lo = problem.domain.corners[0], hi = lo;
    for (const Vec2& c : problem.domain.corners) {
        lo = lo.cwiseMin(c);
        hi = hi.cwiseMax(c);
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(lo.x(), hi.x()), uy(lo.y(), hi.y());

    const Vec2 dx(step, 0.0), dy(0.0, step);
    double max_strain = 0.0, max_div = 0.0;
    double err_strain = 0.0, err_div = 0.0, err_load = 0.0;
    for (int k = 0; k < samples;) {
        const Vec2 p(ux(rng), uy(rng));
        if (!problem.domain.contains(p))
            continue;
        ++k;
        const Vec2 du_dx = (ex.u(p + dx) - ex.u(p - dx)) / (2.0 * step);
        const Vec2 du_dy = (ex.u(p + dy) - ex.u(p - dy)) / (2.0 * step);
        const SymTensor2 eps_fd{du_dx.x(), du_dy.y(), 0.5 * (du_dy.x() + du_dx.y())};
        const SymTensor2 eps = mat.strain(ex.sigma(p));
        err_strain = std::max(err_strain, (eps.triple() - eps_fd.triple()).lpNorm<Eigen::Infinity>());
        max_strain = std::max(max_strain, eps_fd.triple().lpNorm<Eigen::Infinity>());

        const SymTensor2 sx = (1.0 / (2.0 * step)) * (ex.sigma(p + dx) - ex.sigma(p - dx));
        const SymTensor2 sy = (1.0 / (2.0 * step)) * (ex.sigma(p + dy) - ex.sigma(p - dy));
        const Vec2 div_fd(sx.xx + sy.xy, sx.xy + sy.yy);
        const Vec2 div = ex.div_sigma(p);
        err_div = std::max(err_div, (div - div_fd).lpNorm<Eigen::Infinity>());
        const Vec2 f = problem.body_force ? problem.body_force(p) : Vec2::Zero();
        err_load = std::max(err_load, (div + f).lpNorm<Eigen::Infinity>());
        max_div = std::max(max_div, div_fd.lpNorm<Eigen::Infinity>());
    }
    // Floors keep identically-zero fields (f = 0) from dividing by zero.
    const double strain_scale = std::max(max_strain, 1e-300);
    const double div_scale = std::max(max_div, max_strain);
    return {err_strain / strain_scale, err_div / div_scale, err_load / div_scale};
}

} // namespace vemhr
