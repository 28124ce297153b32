#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mdopt/oracles.hpp"
#include "mdopt/problems.hpp"
#include "mdopt/random.hpp"

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

Functional squared_norm()
{
    Functional f;
    f.value = [](const Point& x) { return x.squaredNorm(); };
    f.subgradient = [](const Point& x) -> DualVector { return 2.0 * x; };
    return f;
}

Functional abs_1d()
{
    Functional f;
    f.value = [](const Point& x) { return std::abs(x[0]); };
    f.subgradient = [](const Point& x) -> DualVector { return Point::Constant(1, x[0] > 0 ? 1.0 : (x[0] < 0 ? -1.0 : 0.0)); };
    f.lipschitz = 1.0;
    return f;
}

// max(x1, x2) on R^2; `broken` returns the gradient of the non-attaining piece.
Functional max_affine(bool broken)
{
    Functional f;
    f.value = [](const Point& x) { return std::max(x[0], x[1]); };
    f.subgradient = [broken](const Point& x) -> DualVector {
        const bool first = x[0] >= x[1];
        return (first != broken) ? vec({1, 0}) : vec({0, 1});
    };
    return f;
}

ConstrainedProblem with_objective(Functional f, Eigen::Index n)
{
    ConstrainedProblem p;
    p.dimension = n;
    p.objective = std::move(f);
    p.constraint = no_constraint(n);
    return p;
}

} // namespace

TEST_CASE("vf_gap examples")
{
    const auto p = with_objective(squared_norm(), 2);
    CHECK(vf_gap(p, vec({1, 0}), vec({0, 0})) == doctest::Approx(1.0));
    CHECK(vf_gap(p, vec({0, 0}), vec({1, 1})) == 0.0);  // zero gradient convention

    const auto a = with_objective(abs_1d(), 1);
    CHECK(vf_gap(a, vec({2}), vec({0})) == doctest::Approx(2.0));

    Rng rng(1);
    for (int t = 0; t < 100; ++t) {
        const Point x = uniform_in_ball(rng, Point::Zero(2), 3.0);
        CHECK(vf_gap(p, x, x) == 0.0);
    }
}

TEST_CASE("vf_gap uses the dual norm of the prox setup")
{
    const auto p = with_objective(squared_norm(), 2);
    const auto scaled = ProxSetup::euclidean().rescaled(Point::Zero(2), 4.0);
    // direction (2,0), dual norm 2 * 2 = 4, inner product with (1,0) is 2.
    CHECK(vf_gap(p, scaled, vec({1, 0}), vec({0, 0})) == doctest::Approx(0.5));
}

TEST_CASE("holder constants")
{
    CHECK(holder_majorant(1.0, 1.0, 0.3) == doctest::Approx(0.5));
    CHECK(holder_majorant(1.0, 0.5, 0.25) == doctest::Approx(0.7937005259840997).epsilon(1e-13));
    CHECK(holder_majorant(2.0, 0.0, 1.0) == doctest::Approx(2.0));

    CHECK(holder_bound(1.0, 0.0, 0.1) == doctest::Approx(0.15));
    CHECK(holder_bound(1.0, 0.5, 0.25) == doctest::Approx(0.29960628287400626).epsilon(1e-13));
    CHECK(holder_bound(3.0, 0.5, 1e-8) < 1e-7);

    CHECK_THROWS_AS(holder_bound(1.0, 1.5, 0.1), ConfigError);
    CHECK_THROWS_AS(holder_majorant(1.0, 0.5, 0.0), ConfigError);
}

TEST_CASE("subgradient check")
{
    Rng rng(2);
    const auto q = FeasibleSet::whole_space();
    for (int t = 0; t < 10; ++t) {
        const Point x = uniform_in_ball(rng, Point::Zero(3), 2.0);
        CHECK(check_subgradient(squared_norm(), q, x).passed);
    }
    CHECK(check_subgradient(max_affine(false), q, vec({0.3, -0.2})).passed);
    const auto bad = check_subgradient(max_affine(true), q, vec({0.3, -0.2}));
    CHECK_FALSE(bad.passed);
    CHECK(bad.worst < 0.0);
}

TEST_CASE("subgradient check for the quasi-convex cover objective")
{
    PointCloud cloud;
    cloud.points = {vec({0, 0}), vec({1.5, 0.5}), vec({-0.5, 1.2})};
    cloud.radii = {0.5, 0.5, 0.5};
    const auto f = quasiconvex_cover_objective(cloud, 2.0);
    CHECK(check_subgradient(f, FeasibleSet::whole_space(), vec({0.4, 0.3}), {200, 1.0, 1e-7, 3}).passed);
}

TEST_CASE("missing metadata raises a configuration error")
{
    auto p = with_objective(squared_norm(), 2);
    p.constraint.lipschitz.reset();
    CHECK_THROWS_AS(p.require_mg(), ConfigError);
    CHECK_THROWS_AS(p.require_mf(), ConfigError);
}

TEST_CASE("known solution consistency")
{
    auto p = with_objective(squared_norm(), 2);
    CHECK(is_consistent(p, {vec({0, 0}), 0.0}));
    CHECK_FALSE(is_consistent(p, {vec({1, 0}), 0.0}));
}

TEST_CASE("constraint oracles respect M_g")
{
    Rng rng(4);
    const auto g = linear_constraints(gen_constraint_matrix(8, 6), true);
    const double mg = *g.lipschitz;
    for (int t = 0; t < 1000; ++t) {
        const Point x = uniform_in_ball(rng, Point::Zero(8), 1.0);
        const Point y = uniform_in_ball(rng, Point::Zero(8), 1.0);
        CHECK(std::abs(g(x) - g(y)) <= mg * (x - y).norm() + 1e-7);
        CHECK(g.grad(x).norm() <= mg + 1e-7);
    }
}

TEST_CASE("objective gap is bounded by omega of v_f")
{
    // f(x) = ||x - c||_2 on the plane: omega(t) = t.
    const Point c = vec({0.4, -0.1});
    PointCloud cloud;
    cloud.points = {c};
    const auto problem = fts_problem(cloud);
    REQUIRE(problem.omega);
    Rng rng(6);
    for (int t = 0; t < 1000; ++t) {
        const Point y = uniform_in_ball(rng, Point::Zero(2), 2.0);
        CHECK(problem.f(y) - 0.0 <= problem.omega(vf_gap(problem, y, c)) + 1e-12);
    }
}
