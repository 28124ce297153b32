#pragma once

// Distance-generating functions, Bregman divergences and the mirror step
// Mirr_x(p) = argmin_{u in Q} { <p, u> + V(x, u) } over simple convex sets.

#include "mdopt/types.hpp"

#include <variant>

namespace mdopt {

struct WholeSpace {};

struct EuclideanBall {
    Point center;
    double radius = 1.0;
};

/// {x >= 0, ||x||_2 <= radius}
struct NonnegBall {
    double radius = 1.0;
};

struct ProbabilitySimplex {};

struct Box {
    Point lo;
    Point hi;
};

/// Closed convex feasible set Q. Membership is exact up to kMembershipTol.
class FeasibleSet {
public:
    using Kind = std::variant<WholeSpace, EuclideanBall, NonnegBall, ProbabilitySimplex, Box>;

    static constexpr double kMembershipTol = 1e-12;

    FeasibleSet() = default;
    FeasibleSet(Kind kind);

    static FeasibleSet whole_space() { return FeasibleSet{WholeSpace{}}; }
    static FeasibleSet ball(Point center, double radius);
    static FeasibleSet unit_ball(Eigen::Index n) { return ball(Point::Zero(n), 1.0); }
    static FeasibleSet nonneg_ball(double radius);
    static FeasibleSet simplex() { return FeasibleSet{ProbabilitySimplex{}}; }
    static FeasibleSet box(Point lo, Point hi);

    const Kind& kind() const { return kind_; }
    bool is_simplex() const { return std::holds_alternative<ProbabilitySimplex>(kind_); }

    bool contains(const Point& x, double tol = kMembershipTol) const;

    /// Euclidean projection onto the set.
    Point project(const Point& x) const;

private:
    Kind kind_ = WholeSpace{};
};

/// Euclidean projection onto the probability simplex (sort-based, exact).
Point project_simplex(const Point& x);

enum class ProxKind { Euclidean, Entropy };

/// A d.g.f. together with its feasible set.
///
/// The euclidean setup is d(x) = 1/2 ||(x - c) / R||_2^2, which is 1-strongly
/// convex w.r.t. ||.||_2 / R; the plain setup has c = 0 and R = 1. The dual
/// norm of ||.||_2 / R is R ||.||_2.
///
/// The entropy setup is d(x) = sum x_i ln x_i + ln n on the probability
/// simplex, 1-strongly convex w.r.t. ||.||_1 (dual norm ||.||_inf).
///
/// Immutable after construction.
class ProxSetup {
public:
    static ProxSetup euclidean(FeasibleSet q = FeasibleSet::whole_space());
    /// Euclidean d.g.f. recentred at `center`, so that argmin_Q d = proj_Q(center).
    static ProxSetup euclidean_centered(FeasibleSet q, Point center);
    static ProxSetup entropy();

    ProxKind kind() const { return kind_; }
    const FeasibleSet& feasible() const { return feasible_; }
    /// Empty for the uncentred setups.
    const Point& center() const { return center_; }
    double scale() const { return scale_; }

    double value(const Point& x) const;
    DualVector gradient(const Point& x) const;
    double bregman(const Point& x, const Point& y) const;
    Point mirror_step(const Point& x, const DualVector& p) const;

    /// argmin_{x in Q} d(x); dimension is needed for uncentred setups.
    Point start_point(Eigen::Index n) const;

    double norm(const Point& v) const;
    double dual_norm(const DualVector& p) const;

    /// Converts a Lipschitz constant measured in ||.||_2 into one valid for
    /// this setup's norm. Exact for the euclidean family; for the entropy
    /// setup ||.||_2 <= ||.||_1 so the l2 constant remains an upper bound.
    double lipschitz_in_norm(double l2_constant) const;

    /// d_new(x) = d((x - center) / R). Euclidean setups only.
    ProxSetup rescaled(Point center, double r_sq) const;

private:
    ProxSetup(ProxKind kind, FeasibleSet q, Point center, double scale);

    ProxKind kind_;
    FeasibleSet feasible_;
    Point center_;
    double scale_ = 1.0;
};

/// Entropy coordinates are floored here after each mirror step.
inline constexpr double kEntropyFloor = 1e-300;

double dgf_value(const ProxSetup& setup, const Point& x);
double bregman(const ProxSetup& setup, const Point& x, const Point& y);
Point mirror_step(const ProxSetup& setup, const Point& x, const DualVector& p);
double dual_norm(const ProxSetup& setup, const DualVector& p);

} // namespace mdopt
