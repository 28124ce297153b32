#pragma once

#include "mdopt/prox.hpp"
#include "mdopt/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

namespace mdopt {

enum class FunctionClass {
    Convex,
    QuasiConvex,
    StronglyConvex,
    StronglyQuasiConvex,
    /// Only used by the square-root benchmark objective; its oracle returns a
    /// supergradient.
    Concave,
};

bool is_quasiconvex_only(FunctionClass c);

/// One functional (objective or constraint) together with its oracles.
///
/// `subgradient` returns an element of the (Clarke) subdifferential.
/// `direction`, when set, returns a vector from the normal cone of the
/// sublevel set at x; otherwise the subgradient is used as the direction.
struct Functional {
    std::function<double(const Point&)> value;
    std::function<DualVector(const Point&)> subgradient;
    std::function<DualVector(const Point&)> direction;

    FunctionClass cls = FunctionClass::Convex;
    std::optional<double> lipschitz;  // M, measured in ||.||_2
    std::optional<double> mu;         // strong (quasi-)convexity parameter

    double operator()(const Point& x) const { return value(x); }
    DualVector grad(const Point& x) const { return subgradient(x); }
    DualVector dir(const Point& x) const { return direction ? direction(x) : subgradient(x); }
};

/// f(x) -> min over Q subject to g(x) <= 0.
struct ConstrainedProblem {
    std::string name;
    Eigen::Index dimension = 0;
    Functional objective;
    Functional constraint;
    FeasibleSet feasible;

    std::optional<double> grad_lipschitz;  // L
    std::optional<double> holder_nu;       // nu in [0, 1]
    std::optional<double> holder_m;        // M_nu

    /// omega(t) = max { f(x) - f* : ||x - x*|| <= t, x in Q }, when known
    /// in closed form.
    std::function<double(double)> omega;

    double f(const Point& x) const { return objective.value(x); }
    double g(const Point& x) const { return constraint.value(x); }

    /// M_g; throws ConfigError when the problem does not carry it.
    double require_mg() const;
    double require_mf() const;
};

struct KnownSolution {
    enum class Provenance { Analytic, BruteForce };

    Point x_star;
    double f_star = 0.0;
    Provenance provenance = Provenance::Analytic;
    /// Certified accuracy of f_star (0 for analytic solutions).
    double accuracy = 0.0;
};

/// Checks the KnownSolution invariants: g(x*) <= 1e-9 and f* = f(x*).
bool is_consistent(const ConstrainedProblem& problem, const KnownSolution& known, double tol = 1e-9);

/// v_f(y, x*) = < Df(y) / ||Df(y)||_*, y - x* >, and 0 for a zero direction.
/// The overload without a setup uses the euclidean norm.
double vf_gap(const ConstrainedProblem& problem, const Point& y, const Point& x_star);
double vf_gap(const ConstrainedProblem& problem, const ProxSetup& prox, const Point& y, const Point& x_star);

/// v for an explicit direction p.
double normalized_gap(const ProxSetup& prox, const DualVector& p, const Point& y, const Point& x_star);

/// Quadratic-majorant coefficient M_nu^{2/(1+nu)} / (2 eps^{(1-nu)/(1+nu)}).
double holder_majorant(double m_nu, double nu, double eps);

/// Objective-gap guarantee M_nu^{2/(1+nu)} / 2 * eps^{1 + 2nu/(1+nu)} + eps.
double holder_bound(double m_nu, double nu, double eps);

struct SubgradientReport {
    bool passed = true;
    int checked = 0;      // samples that entered the inequality
    double worst = 0.0;   // most negative slack seen (0 when all pass)
    Point worst_sample;
};

struct SubgradientCheckOptions {
    int trials = 100;
    double radius = 1.0;  // samples y are drawn uniformly from the ball B(x, radius) ∩ Q
    double tol = 1e-7;
    std::uint64_t seed = 1;
};

/// Samples y around x and verifies the inequality appropriate to the
/// functional's class:
///   convex / strongly convex : f(y) >= f(x) + <g, y - x>
///   concave                  : f(y) <= f(x) + <g, y - x>
///   quasi-convex             : <Df(x), x - y> >= 0 whenever f(y) <= f(x)
SubgradientReport check_subgradient(const Functional& fn, const FeasibleSet& q, const Point& x,
                                    const SubgradientCheckOptions& opts = {});

SubgradientReport check_subgradient(const ConstrainedProblem& problem, const Point& x,
                                    const SubgradientCheckOptions& opts = {});

} // namespace mdopt
