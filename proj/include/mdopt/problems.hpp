#pragma once

// Benchmark problems: Fermat-Torricelli-Steiner, smallest covering ball, the
// square-root Hölder objective, the quasi-convex weighted covering ball, the
// max-of-linear constraint system, and a grid-search optimum oracle for
// low-dimensional instances.

#include "mdopt/oracles.hpp"
#include "mdopt/prox.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mdopt {

struct PointCloud {
    std::vector<Point> points;
    std::vector<double> radii;  // empty unless the family uses ball radii
    std::uint64_t seed = 0;

    std::size_t size() const { return points.size(); }
    Eigen::Index dimension() const { return points.empty() ? 0 : points.front().size(); }
};

/// `count` points in R^n with integer coordinates drawn uniformly from [lo, hi].
PointCloud integer_cloud(Eigen::Index n, std::size_t count, std::uint64_t seed, int lo = -10, int hi = 10);

/// `count` points with ||A_k||_2 uniform in [r_min, r_max] and uniformly
/// distributed directions; every ball radius set to `radius`.
PointCloud shell_cloud(Eigen::Index n, std::size_t count, std::uint64_t seed, double radius = 1.0,
                       double r_min = 1.0, double r_max = 2.0);

/// m x n matrix with positive integer rows
///   row 1 = (1, 1, ..., 1), row 2 = (1, 2, ..., 2), row 3 = (1, 3, ..., 3),
///   row k >= 4 = (1, k-2, k-1, ..., n+k-4).
struct ConstraintMatrix {
    Eigen::MatrixXd rows;

    Eigen::Index m() const { return rows.rows(); }
    Eigen::Index n() const { return rows.cols(); }
};

ConstraintMatrix gen_constraint_matrix(Eigen::Index n, Eigen::Index m = 20);

/// g(x) = max_m ( <alpha_m, |x|> - 1 )  (use_abs) or  max_m ( <alpha_m, x> - 1 ).
/// The subgradient is taken from the lowest-index attaining row;
/// M_g = max_m ||alpha_m||_2.
Functional linear_constraints(ConstraintMatrix matrix, bool use_abs);

/// g(x) = -1, for unconstrained instances.
Functional no_constraint(Eigen::Index n);

/// f(x) = (1/r) sum_k ||x - A_k||_2, M_f = 1.
Functional fts_objective(const PointCloud& cloud);

/// f(x) = max_k ||x - A_k||_2, M_f = 1.
Functional covering_ball_objective(const PointCloud& cloud);

/// f(x) = (1/n) sum_i sqrt(x_i) on the nonnegative orthant (concave,
/// Hölder with nu = 1/2, M_nu = 1).
Functional holder_sqrt_objective(Eigen::Index n);

/// f(x) = max_k d_k(x) with
///   d_k(x) = ||x - A_k|| + (rho - 1) r_k   if ||x - A_k|| > r_k,
///            rho ||x - A_k||               otherwise.
/// Quasi-convex, M_f = rho.
Functional quasiconvex_cover_objective(const PointCloud& cloud, double rho);

/// True when the attaining piece of the quasi-convex cover objective sits at
/// its own center, where the oracle returns the zero vector.
bool qc_cover_at_center(const PointCloud& cloud, double rho, const Point& x);

ConstrainedProblem make_problem(std::string name, Eigen::Index n, Functional objective, Functional constraint,
                                FeasibleSet q = FeasibleSet::whole_space());

ConstrainedProblem fts_problem(const PointCloud& cloud);
ConstrainedProblem covering_ball_problem(const PointCloud& cloud);
ConstrainedProblem holder_sqrt_problem(Eigen::Index n);
ConstrainedProblem quasiconvex_cover_problem(const PointCloud& cloud, double rho);

/// f(x) = ||x - c||^2, g(x) = ||x - c_g||^2 - r^2 on the unit ball, with the
/// disk {g <= 0} inside the unit ball. Both are 2-strongly convex; x* is the
/// point of the disk nearest to c.
struct StronglyConvexPair {
    ConstrainedProblem problem;
    Point x_star;
    double g_star = 0.0;  // ||grad f(x*)||_2
    double l = 2.0;       // gradient Lipschitz constant of f
    double mu = 2.0;
};

StronglyConvexPair strongly_convex_pair(const Point& c, const Point& c_g, double r);

class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct BruteForceOptions {
    double resolution = 1e-4;
    int coarse_points = 201;  // per axis
};

/// Grid scan over the feasible grid points of [lo, hi] (Q and g <= 0),
/// followed by successively finer local scans around the incumbent until
/// the grid spacing reaches `resolution`. Ties go to the lexicographically
/// smallest grid point. Dimension <= 3.
KnownSolution brute_force_optimum(const ConstrainedProblem& problem, const Point& lo, const Point& hi,
                                  const BruteForceOptions& opts = {});

/// Plain-text fixtures: one row per line, space-separated decimals.
void write_rows(std::ostream& out, const std::vector<Point>& rows);
std::vector<Point> read_rows(std::istream& in);
void write_matrix(std::ostream& out, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix(std::istream& in);

/// (0.1, ..., 0.1) / ||(0.1, ..., 0.1)||_2
Point normalized_start(Eigen::Index n);

enum class Family { Fts, CoveringBall, HolderSqrt, QcCover, ScQuadratic };

const char* to_string(Family f);
std::optional<Family> parse_family(const std::string& s);

struct InstanceSpec {
    Family family = Family::Fts;
    Eigen::Index n = 1000;
    Eigen::Index m = 20;
    std::uint64_t seed = 1;
    bool abs_constraint = true;
    std::size_t points = 5;
    double rho = 2.0;
    double radius = 1.0;
};

/// A ready-to-run benchmark: the problem, a euclidean d.g.f. recentred at
/// the normalized start, and the analytic solution when one exists.
struct BenchmarkInstance {
    ConstrainedProblem problem;
    ProxSetup prox;
    Point x0;
    std::optional<KnownSolution> known;
    /// Set for Family::ScQuadratic.
    std::optional<StronglyConvexPair> strongly_convex;
};

BenchmarkInstance make_instance(const InstanceSpec& spec);

} // namespace mdopt
