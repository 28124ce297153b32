#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mdopt/problems.hpp"
#include "mdopt/random.hpp"
#include "mdopt/solvers.hpp"

#include <cmath>

using namespace mdopt;

namespace {

Point vec(std::initializer_list<double> v)
{
    Point p(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v)
        p[i++] = x;
    return p;
}

// f(x) = |x - 0.5|, g(x) = x - 1 on [-2, 2]; x* = 0.5, f* = 0.
ConstrainedProblem kink_problem()
{
    Functional f;
    f.value = [](const Point& x) { return std::abs(x[0] - 0.5); };
    f.subgradient = [](const Point& x) -> DualVector { return Point::Constant(1, x[0] >= 0.5 ? 1.0 : -1.0); };
    f.lipschitz = 1.0;
    Functional g;
    g.value = [](const Point& x) { return x[0] - 1.0; };
    g.subgradient = [](const Point&) -> DualVector { return Point::Constant(1, 1.0); };
    g.lipschitz = 1.0;
    return make_problem("kink", 1, f, g, FeasibleSet::box(vec({-2}), vec({2})));
}

const KnownSolution kink_solution{vec({0.5}), 0.0};

// 2-D instance of the quasi-convex cover objective under the first two
// columns of the constraint matrix.
struct DeskExample {
    ConstrainedProblem problem;
    KnownSolution known;
};

DeskExample desk_quasiconvex(std::uint64_t seed)
{
    const auto cloud = shell_cloud(2, 5, seed, 0.2);
    ConstraintMatrix m{gen_constraint_matrix(20, 20).rows.leftCols(2)};
    auto problem = make_problem("qc-desk", 2, quasiconvex_cover_objective(cloud, 2.0), linear_constraints(m, false));
    BruteForceOptions opts;
    opts.resolution = 1e-4;
    auto known = brute_force_optimum(problem, vec({-3, -3}), vec({3, 3}), opts);
    return {std::move(problem), std::move(known)};
}

} // namespace

TEST_CASE("fixed budget")
{
    CHECK(fixed_budget(2.0, 1.0 / 2) == 16);
    CHECK(fixed_budget(2.0, 1.0 / 4) == 64);
    CHECK(fixed_budget(2.0, 1.0 / 6) == 144);
    CHECK(fixed_budget(2.0, 1.0 / 8) == 256);
    CHECK(fixed_budget(2.0, 1.0 / 10) == 400);
    CHECK(fixed_budget(2.0, 1.0 / 12) == 576);
    CHECK(fixed_budget(1.0, 0.3) == 23);
    CHECK(prior_budget_bound(0.5, 2.0, 0.5) == 16);
    CHECK(prior_budget_bound(3.0, 2.0, 0.5) == 144);
}

TEST_CASE("prior scheme on the kink problem")
{
    const auto p = kink_problem();
    SolverConfig c;
    c.eps = 0.1;
    c.theta0_sq = 2.0;
    const auto r = solve_prior_adaptive(p, ProxSetup::euclidean(p.feasible), c);
    CHECK(r.best_f - 0.0 <= 0.1);
    CHECK(r.g_at_output <= 0.1);
    CHECK(r.n_total <= fixed_budget(2.0, 0.1));
    CHECK(r.n_productive >= 1);
    CHECK(r.stop_reason == StopReason::Criterion);
}

TEST_CASE("new scheme on the kink problem")
{
    const auto p = kink_problem();
    SolverConfig c;
    c.eps = 0.05;
    c.theta0_sq = 2.0;
    c.record_trace = true;
    const auto r = solve_new_adaptive(p, ProxSetup::euclidean(p.feasible), c);
    CHECK(r.n_total == fixed_budget(2.0, 0.05));
    CHECK(r.n_total == r.n_productive + r.n_nonproductive);
    CHECK(r.best_f <= 1.0 * 0.05);
    CHECK(r.trace.size() == r.n_total);
    CHECK(certify_run(r, p, ProxSetup::euclidean(p.feasible), kink_solution).passed);
}

TEST_CASE("budget exactness on a matrix-constrained instance")
{
    InstanceSpec spec;
    spec.n = 40;
    const auto inst = make_instance(spec);
    for (double eps : {1.0 / 2, 1.0 / 4, 1.0 / 6, 1.0 / 8, 1.0 / 10, 1.0 / 12}) {
        SolverConfig c;
        c.eps = eps;
        c.theta0_sq = 2.0;
        c.x0 = inst.x0;
        const auto r = solve_new_adaptive(inst.problem, inst.prox, c);
        CHECK(r.n_total == fixed_budget(2.0, eps));
        CHECK(r.g_at_output <= eps * inst.problem.require_mg() + 1e-9);
        const auto q = solve_quasiconvex(inst.problem, inst.prox, c);
        CHECK(q.n_total == fixed_budget(2.0, eps));
    }
}

TEST_CASE("zero objective gradient stops the run")
{
    Functional f;
    f.value = [](const Point& x) { return x.squaredNorm(); };
    f.subgradient = [](const Point& x) -> DualVector { return 2.0 * x; };
    const auto p = make_problem("sq", 2, f, no_constraint(2));
    SolverConfig c;
    c.eps = 0.1;
    c.theta0_sq = 1.0;
    const auto r = solve_new_adaptive(p, ProxSetup::euclidean(), c);
    CHECK(r.stop_reason == StopReason::ZeroGradient);
    CHECK(r.n_total == 1);
    CHECK(r.best_f == 0.0);
}

TEST_CASE("zero constraint direction at a violated point is an oracle error")
{
    Functional g;
    g.value = [](const Point&) { return 1.0; };
    g.subgradient = [](const Point&) -> DualVector { return Point::Zero(1); };
    g.lipschitz = 1.0;
    auto p = kink_problem();
    p.constraint = g;
    SolverConfig c;
    c.eps = 0.1;
    c.theta0_sq = 1.0;
    CHECK_THROWS_AS(solve_new_adaptive(p, ProxSetup::euclidean(p.feasible), c), OracleError);
    CHECK_THROWS_AS(solve_prior_adaptive(p, ProxSetup::euclidean(p.feasible), c), OracleError);
}

TEST_CASE("empty productive set means Theta0 was too small")
{
    Functional g;
    g.value = [](const Point& x) { return 10.0 - x[0]; };
    g.subgradient = [](const Point&) -> DualVector { return Point::Constant(1, -1.0); };
    g.lipschitz = 1.0;
    auto p = kink_problem();
    p.feasible = FeasibleSet::whole_space();
    p.constraint = g;
    SolverConfig c;
    c.eps = 0.1;
    c.theta0_sq = 1e-3;
    try {
        solve_new_adaptive(p, ProxSetup::euclidean(), c);
        FAIL("expected InvalidThetaError");
    } catch (const InvalidThetaError& e) {
        CHECK(e.partial().n_productive == 0);
        CHECK(e.partial().n_total == 1);
    }
}

TEST_CASE("hard cap and deadline")
{
    InstanceSpec spec;
    spec.n = 200;
    const auto inst = make_instance(spec);
    SolverConfig c;
    c.eps = 0.01;
    c.theta0_sq = 2.0;
    c.x0 = inst.x0;
    c.hard_cap = 5;
    try {
        solve_prior_adaptive(inst.problem, inst.prox, c);
        FAIL("expected CapReached");
    } catch (const CapReached& e) {
        CHECK(e.partial().n_total == 5);
        CHECK(e.partial().stop_reason == StopReason::Cap);
    }

    c.hard_cap = 10'000'000;
    c.deadline = std::chrono::steady_clock::now() - std::chrono::seconds(1);
    CHECK_THROWS_AS(solve_prior_adaptive(inst.problem, inst.prox, c), TimeLimitReached);
}

TEST_CASE("invalid configuration")
{
    const auto p = kink_problem();
    SolverConfig c;
    c.eps = 0.0;
    CHECK_THROWS_AS(solve_new_adaptive(p, ProxSetup::euclidean(p.feasible), c), ConfigError);
    c.eps = 0.1;
    c.theta0_sq = -1.0;
    CHECK_THROWS_AS(solve_new_adaptive(p, ProxSetup::euclidean(p.feasible), c), ConfigError);

    auto missing = p;
    missing.constraint.lipschitz.reset();
    c.theta0_sq = 1.0;
    CHECK_THROWS_AS(solve_quasiconvex(missing, ProxSetup::euclidean(p.feasible), c), ConfigError);
}

TEST_CASE("ties on f go to the earliest productive iterate")
{
    Functional f;
    f.value = [](const Point&) { return 1.0; };
    f.subgradient = [](const Point&) -> DualVector { return Point::Constant(1, 1.0); };
    const auto p = make_problem("flat", 1, f, no_constraint(1));
    SolverConfig c;
    c.eps = 0.5;
    c.theta0_sq = 1.0;
    const auto r = solve_new_adaptive(p, ProxSetup::euclidean(), c);
    CHECK(r.best_index == 0);
    CHECK(r.x_bar[0] == 0.0);
}

TEST_CASE("runs are deterministic")
{
    InstanceSpec spec;
    spec.family = Family::CoveringBall;
    spec.n = 30;
    const auto inst = make_instance(spec);
    SolverConfig c;
    c.eps = 0.25;
    c.theta0_sq = 2.0;
    c.x0 = inst.x0;
    c.record_trace = true;
    for (auto alg : {Algorithm::PriorAdaptive, Algorithm::NewAdaptive}) {
        const auto a = solve(alg, inst.problem, inst.prox, c);
        const auto b = solve(alg, inst.problem, inst.prox, c);
        REQUIRE(a.trace.size() == b.trace.size());
        for (std::size_t k = 0; k < a.trace.size(); ++k) {
            CHECK(a.trace[k].after == b.trace[k].after);
            CHECK(a.trace[k].h == b.trace[k].h);
        }
        CHECK(a.x_bar == b.x_bar);
    }
}

TEST_CASE("prior scheme respects its iteration bound")
{
    // M_g = 1, so the bound is ceil(2 Theta^2 / eps^2).
    const auto p = kink_problem();
    for (double eps : {0.5, 0.2, 0.1, 0.05}) {
        SolverConfig c;
        c.eps = eps;
        c.theta0_sq = 2.0;
        const auto r = solve_prior_adaptive(p, ProxSetup::euclidean(p.feasible), c);
        CHECK(r.n_total <= prior_budget_bound(1.0, 2.0, eps));
    }
}

TEST_CASE("certificates detect a corrupted step")
{
    const auto p = kink_problem();
    const auto prox = ProxSetup::euclidean(p.feasible);
    SolverConfig c;
    c.eps = 0.1;
    c.theta0_sq = 2.0;
    c.record_trace = true;
    for (auto alg : {Algorithm::PriorAdaptive, Algorithm::NewAdaptive}) {
        const auto clean = solve(alg, p, prox, c);
        REQUIRE(certify_run(clean, p, prox, kink_solution).passed);

        for (std::size_t k : {std::size_t{0}, clean.trace.size() / 2}) {
            auto broken = clean;
            broken.trace[k].h *= 2.0;
            const auto cert = certify_run(broken, p, prox, kink_solution);
            CHECK_FALSE(cert.passed);
            REQUIRE(cert.first_failure());
            CHECK(*cert.first_failure() == k);
        }
    }
    RunReport untraced;
    CHECK_THROWS_AS(certify_run(untraced, p, prox, kink_solution), ConfigError);
}

TEST_CASE("streaming certification matches the recorded trace")
{
    const auto p = kink_problem();
    const auto prox = ProxSetup::euclidean(p.feasible);
    SolverConfig c;
    c.eps = 0.1;
    c.theta0_sq = 2.0;
    c.record_trace = true;
    Certifier live(Algorithm::NewAdaptive, c.eps, p, prox, kink_solution);
    c.observer = [&live](const IterationRecord& r) { live.observe(r); };
    const auto r = solve_new_adaptive(p, prox, c);
    const auto a = live.finish();
    const auto b = certify_run(r, p, prox, kink_solution);
    CHECK(a.passed == b.passed);
    CHECK(a.checked == b.checked);
    CHECK(a.min_vf == b.min_vf);
}

TEST_CASE("quasi-convex scheme on a desk-scale covering instance")
{
    const auto ex = desk_quasiconvex(21);
    const Point x0 = normalized_start(2);
    const auto prox = ProxSetup::euclidean_centered(FeasibleSet::whole_space(), x0);
    SolverConfig c;
    c.eps = 0.1;
    c.theta0_sq = std::max(2.0, prox.bregman(x0, ex.known.x_star));
    c.x0 = x0;
    c.record_trace = true;
    const auto r = solve_quasiconvex(ex.problem, prox, c);
    const double mg = ex.problem.require_mg();
    CHECK(r.g_at_output <= mg * 0.1 + 1e-9);
    CHECK(r.best_f - ex.known.f_star <= 2.0 * 0.1 + ex.known.accuracy + 1e-6);
    const auto cert = certify_run(r, ex.problem, prox, ex.known);
    CHECK(cert.passed);
}
