#include "vemhr/error.hpp"
#include "vemhr/problems.hpp"
#include "vemhr/runner.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace vemhr;

namespace {

std::string convergence_csv(const RunConfig& cfg)
{
    const ConvergenceResult r = run_convergence(make_problem(cfg.problem), cfg.kinds.front(), cfg);
    std::ostringstream out;
    write_convergence_csv(out, r.table);
    return out.str();
}

} // namespace

TEST(RunConfig, DefaultsValidate)
{
    EXPECT_NO_THROW(RunConfig{}.validate());
    EXPECT_EQ(RunConfig{}.assembly_options().stabilization_scale, AssemblyOptions{}.stabilization_scale);
}

TEST(RunConfig, ApplyParsesEveryKey)
{
    RunConfig c;
    apply_config(c, {{"problem", "test-inc"},
                     {"nu", "0.3"},
                     {"lambda", "2"},
                     {"mu", "0.5"},
                     {"kinds", "quad,cvor"},
                     {"levels", "4,8"},
                     {"stab", "stab1bis"},
                     {"stab_scale", "0.5"},
                     {"load_degree", "8"},
                     {"boundary_degree", "7"},
                     {"error_degree", "9"},
                     {"tolerance", "1e-9"},
                     {"seed", "42"},
                     {"rate_window", "2"},
                     {"cook_nus", "0.3,0.4"},
                     {"reference_level", "16"}});
    EXPECT_EQ(c.problem, "test-inc");
    EXPECT_EQ(c.nu, 0.3);
    EXPECT_EQ(*c.lambda, 2.0);
    EXPECT_EQ(*c.mu, 0.5);
    EXPECT_EQ(c.kinds, (std::vector<MeshKind>{MeshKind::quad_structured, MeshKind::poly_voronoi_cvt}));
    EXPECT_EQ(c.levels, (std::vector<int>{4, 8}));
    EXPECT_EQ(c.stabilization, Stabilization::edge_length);
    EXPECT_EQ(c.stabilization_scale, 0.5);
    EXPECT_EQ(c.load_degree, 8);
    EXPECT_EQ(c.boundary_degree, 7);
    EXPECT_EQ(c.error_degree, 9);
    EXPECT_EQ(c.solver_tolerance, 1e-9);
    EXPECT_EQ(c.seed, 42u);
    EXPECT_EQ(c.rate_window, 2);
    EXPECT_EQ(c.cook_nus, (std::vector<double>{0.3, 0.4}));
    EXPECT_EQ(c.cook_reference_level, 16);
}

TEST(RunConfig, RejectsBadInput)
{
    RunConfig c;
    EXPECT_THROW(apply_config(c, {{"colour", "red"}}), ValidationError);
    EXPECT_THROW(apply_config(c, {{"levels", "4,x"}}), ValidationError);
    EXPECT_THROW(apply_config(c, {{"stab", "stab2"}}), ValidationError);
    RunConfig bad;
    bad.stabilization_scale = -1.0;
    EXPECT_THROW(bad.validate(), ValidationError);
    RunConfig empty;
    empty.levels.clear();
    EXPECT_THROW(empty.validate(), ValidationError);
}

TEST(RunConfig, WriteReadRoundTrip)
{
    RunConfig c;
    c.problem = "test-a";
    c.levels = {3, 6, 12};
    c.kinds = {MeshKind::hex_structured};
    c.stabilization_scale = 0.3;
    c.seed = 99;
    const auto dir = std::filesystem::temp_directory_path() / "vemhr_runner_cfg";
    std::filesystem::create_directories(dir);
    const auto path = dir / "run.cfg";
    {
        std::ofstream out(path);
        write_config(out, c);
    }
    RunConfig back;
    apply_config(back, read_config_file(path));
    std::ostringstream a, b;
    write_config(a, c);
    write_config(b, back);
    EXPECT_EQ(a.str(), b.str());
    std::filesystem::remove_all(dir);
}

TEST(Runner, ConvergenceCsvIsByteIdentical)
{
    RunConfig cfg;
    cfg.problem = "test-b";
    cfg.kinds = {MeshKind::poly_voronoi_random};
    cfg.levels = {4, 6, 8};
    const std::string a = convergence_csv(cfg);
    const std::string b = convergence_csv(cfg);
    EXPECT_EQ(a, b);
    cfg.seed += 1;
    EXPECT_NE(a, convergence_csv(cfg));
}

TEST(Runner, CookCsvIsByteIdentical)
{
    RunConfig cfg;
    cfg.problem = "cook";
    cfg.kinds = {MeshKind::quad_structured, MeshKind::poly_voronoi_random};
    cfg.levels = {2, 4};
    cfg.cook_nus = {1.0 / 3.0};
    auto run = [&] {
        std::ostringstream out;
        write_cook_csv(out, run_cook(cfg));
        return out.str();
    };
    const std::string a = run();
    EXPECT_EQ(a, run());
    EXPECT_EQ(a.substr(0, a.find('\n')), "kind,nu,level,n_dof,v_A");
}

TEST(Runner, LevelFailureIsRecorded)
{
    RunConfig cfg;
    cfg.levels = {2, 4, 8};
    cfg.solver_tolerance = 1e-30;
    const ConvergenceResult r = run_convergence(problem_test_b(), MeshKind::quad_structured, cfg);
    ASSERT_EQ(r.levels.size(), 3u);
    for (const LevelResult& l : r.levels) {
        EXPECT_FALSE(l.ok);
        EXPECT_FALSE(l.failure.empty());
    }
    EXPECT_TRUE(std::isnan(r.table.rate_sigma));
}

TEST(Runner, RejectsInconsistentExactSolution)
{
    ProblemSpec p = problem_test_b();
    const VectorField f = p.body_force;
    p.body_force = [f](const Vec2& x) { return Vec2(2.0 * f(x)); };
    RunConfig cfg;
    cfg.levels = {2, 4, 8};
    EXPECT_THROW(run_convergence(p, MeshKind::quad_structured, cfg), ValidationError);
}
