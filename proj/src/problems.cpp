#include "mdopt/problems.hpp"

#include "mdopt/random.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace mdopt {

PointCloud integer_cloud(Eigen::Index n, std::size_t count, std::uint64_t seed, int lo, int hi)
{
    if (n < 1 || count < 1 || lo > hi)
        throw ConfigError("integer_cloud: need n >= 1, count >= 1, lo <= hi");
    PointCloud cloud;
    cloud.seed = seed;
    Rng rng(seed);
    cloud.points.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        Point a(n);
        for (Eigen::Index i = 0; i < n; ++i)
            a[i] = static_cast<double>(uniform_int(rng, lo, hi));
        cloud.points.push_back(std::move(a));
    }
    return cloud;
}

PointCloud shell_cloud(Eigen::Index n, std::size_t count, std::uint64_t seed, double radius, double r_min,
                       double r_max)
{
    if (n < 1 || count < 1 || !(radius > 0.0) || r_min < 0.0 || r_min > r_max)
        throw ConfigError("shell_cloud: invalid parameters");
    PointCloud cloud;
    cloud.seed = seed;
    Rng rng(seed);
    for (std::size_t k = 0; k < count; ++k) {
        const double r = uniform(rng, r_min, r_max);
        cloud.points.push_back(r * unit_direction(rng, n));
        cloud.radii.push_back(radius);
    }
    return cloud;
}

ConstraintMatrix gen_constraint_matrix(Eigen::Index n, Eigen::Index m)
{
    if (m < 4 || n < m)
        throw ConfigError("gen_constraint_matrix: need n >= m >= 4");
    ConstraintMatrix out{Eigen::MatrixXd(m, n)};
    auto& a = out.rows;
    a.col(0).setOnes();
    for (Eigen::Index k = 1; k <= m; ++k) {
        for (Eigen::Index j = 2; j <= n; ++j) {
            double v = 0.0;
            if (k <= 3)
                v = static_cast<double>(k);
            else
                v = static_cast<double>(j + k - 4);
            a(k - 1, j - 1) = v;
        }
    }
    return out;
}

Functional linear_constraints(ConstraintMatrix matrix, bool use_abs)
{
    auto rows = std::make_shared<const Eigen::MatrixXd>(std::move(matrix.rows));
    Functional g;
    const auto lhs = [rows, use_abs](const Point& x) -> Eigen::VectorXd {
        if (use_abs)
            return *rows * x.cwiseAbs();
        return *rows * x;
    };
    g.value = [lhs](const Point& x) { return lhs(x).maxCoeff() - 1.0; };
    g.subgradient = [rows, lhs, use_abs](const Point& x) -> DualVector {
        Eigen::Index best = 0;
        lhs(x).maxCoeff(&best);  // first maximal index
        DualVector p = rows->row(best).transpose();
        if (use_abs)
            p.array() *= x.array().sign();
        return p;
    };
    g.cls = FunctionClass::Convex;
    g.lipschitz = rows->rowwise().norm().maxCoeff();
    return g;
}

Functional no_constraint(Eigen::Index n)
{
    Functional g;
    g.value = [](const Point&) { return -1.0; };
    g.subgradient = [n](const Point&) -> DualVector { return DualVector::Zero(n); };
    g.lipschitz = 0.0;
    return g;
}

Functional fts_objective(const PointCloud& cloud)
{
    if (cloud.size() == 0)
        throw ConfigError("fts_objective: empty point cloud");
    auto pts = std::make_shared<const std::vector<Point>>(cloud.points);
    Functional f;
    f.value = [pts](const Point& x) {
        double sum = 0.0;
        for (const auto& a : *pts)
            sum += (x - a).norm();
        return sum / static_cast<double>(pts->size());
    };
    f.subgradient = [pts](const Point& x) -> DualVector {
        DualVector p = DualVector::Zero(x.size());
        for (const auto& a : *pts) {
            const double d = (x - a).norm();
            if (d > 0.0)
                p += (x - a) / d;
        }
        return p / static_cast<double>(pts->size());
    };
    f.lipschitz = 1.0;
    return f;
}

namespace {

// Index of the first maximal entry of values(k).
template <class F>
std::size_t first_argmax(std::size_t count, F&& values, double* best_value)
{
    std::size_t best = 0;
    double v_best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < count; ++k) {
        const double v = values(k);
        if (v > v_best) {
            v_best = v;
            best = k;
        }
    }
    if (best_value)
        *best_value = v_best;
    return best;
}

} // namespace

Functional covering_ball_objective(const PointCloud& cloud)
{
    if (cloud.size() == 0)
        throw ConfigError("covering_ball_objective: empty point cloud");
    auto pts = std::make_shared<const std::vector<Point>>(cloud.points);
    Functional f;
    f.value = [pts](const Point& x) {
        double best = 0.0;
        first_argmax(pts->size(), [&](std::size_t k) { return (x - (*pts)[k]).norm(); }, &best);
        return best;
    };
    f.subgradient = [pts](const Point& x) -> DualVector {
        double d = 0.0;
        const auto k = first_argmax(pts->size(), [&](std::size_t i) { return (x - (*pts)[i]).norm(); }, &d);
        if (d == 0.0)
            return DualVector::Zero(x.size());
        return (x - (*pts)[k]) / d;
    };
    f.lipschitz = 1.0;
    return f;
}

namespace {

constexpr double kSqrtFloor = 1e-12;

} // namespace

Functional holder_sqrt_objective(Eigen::Index n)
{
    if (n < 1)
        throw ConfigError("holder_sqrt_objective: n must be positive");
    const double inv_n = 1.0 / static_cast<double>(n);
    Functional f;
    f.value = [inv_n](const Point& x) {
        if (x.size() > 0 && x.minCoeff() < 0.0)
            throw DomainError("square-root objective is defined on the nonnegative orthant only");
        return inv_n * x.array().sqrt().sum();
    };
    f.subgradient = [inv_n](const Point& x) -> DualVector {
        if (x.size() > 0 && x.minCoeff() < 0.0)
            throw DomainError("square-root objective is defined on the nonnegative orthant only");
        DualVector p(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i)
            p[i] = x[i] < kSqrtFloor ? 0.0 : inv_n / (2.0 * std::sqrt(x[i]));
        return p;
    };
    f.cls = FunctionClass::Concave;
    return f;
}

namespace {

double qc_piece(double dist, double radius, double rho)
{
    return dist > radius ? dist + (rho - 1.0) * radius : rho * dist;
}

} // namespace

Functional quasiconvex_cover_objective(const PointCloud& cloud, double rho)
{
    if (cloud.size() == 0)
        throw ConfigError("quasiconvex_cover_objective: empty point cloud");
    if (!(rho > 1.0))
        throw ConfigError("quasiconvex_cover_objective: rho must exceed 1");
    if (cloud.radii.size() != cloud.size())
        throw ConfigError("quasiconvex_cover_objective: every center needs a radius");
    for (double r : cloud.radii)
        if (!(r > 0.0))
            throw ConfigError("quasiconvex_cover_objective: radii must be positive");

    auto data = std::make_shared<const PointCloud>(cloud);
    Functional f;
    const auto piece = [data, rho](const Point& x, std::size_t k) {
        return qc_piece((x - data->points[k]).norm(), data->radii[k], rho);
    };
    f.value = [data, piece](const Point& x) {
        double best = 0.0;
        first_argmax(data->size(), [&](std::size_t k) { return piece(x, k); }, &best);
        return best;
    };
    f.subgradient = [data, piece, rho](const Point& x) -> DualVector {
        const auto k = first_argmax(data->size(), [&](std::size_t i) { return piece(x, i); }, nullptr);
        const Point shift = x - data->points[k];
        const double dist = shift.norm();
        if (dist == 0.0)
            return DualVector::Zero(x.size());
        // On the sphere dist == r_k the outer branch's element is used.
        const double slope = dist >= data->radii[k] ? 1.0 : rho;
        return slope * shift / dist;
    };
    f.cls = FunctionClass::QuasiConvex;
    f.lipschitz = rho;
    return f;
}

bool qc_cover_at_center(const PointCloud& cloud, double rho, const Point& x)
{
    const auto k = first_argmax(
        cloud.size(), [&](std::size_t i) { return qc_piece((x - cloud.points[i]).norm(), cloud.radii[i], rho); },
        nullptr);
    return (x - cloud.points[k]).norm() == 0.0;
}

ConstrainedProblem make_problem(std::string name, Eigen::Index n, Functional objective, Functional constraint,
                                FeasibleSet q)
{
    ConstrainedProblem p;
    p.name = std::move(name);
    p.dimension = n;
    p.objective = std::move(objective);
    p.constraint = std::move(constraint);
    p.feasible = std::move(q);
    if (p.objective.lipschitz) {
        const double mf = *p.objective.lipschitz;
        p.omega = [mf](double t) { return mf * t; };
    }
    return p;
}

ConstrainedProblem fts_problem(const PointCloud& cloud)
{
    const auto n = cloud.dimension();
    return make_problem("fts", n, fts_objective(cloud), no_constraint(n));
}

ConstrainedProblem covering_ball_problem(const PointCloud& cloud)
{
    const auto n = cloud.dimension();
    return make_problem("covering-ball", n, covering_ball_objective(cloud), no_constraint(n));
}

ConstrainedProblem holder_sqrt_problem(Eigen::Index n)
{
    auto p = make_problem("holder-sqrt", n, holder_sqrt_objective(n), no_constraint(n), FeasibleSet::nonneg_ball(1.0));
    p.holder_nu = 0.5;
    p.holder_m = 1.0;
    return p;
}

ConstrainedProblem quasiconvex_cover_problem(const PointCloud& cloud, double rho)
{
    const auto n = cloud.dimension();
    return make_problem("qc-cover", n, quasiconvex_cover_objective(cloud, rho), no_constraint(n));
}

StronglyConvexPair strongly_convex_pair(const Point& c, const Point& c_g, double r)
{
    const auto n = c.size();
    if (c_g.size() != n || !(r > 0.0))
        throw ConfigError("strongly_convex_pair: dimension mismatch or non-positive radius");
    if (c.norm() > 1.0 || c_g.norm() + r > 1.0)
        throw ConfigError("strongly_convex_pair: need ||c|| <= 1 and the constraint disk inside the unit ball");

    Functional f;
    f.value = [c](const Point& x) { return (x - c).squaredNorm(); };
    f.subgradient = [c](const Point& x) -> DualVector { return 2.0 * (x - c); };
    f.cls = FunctionClass::StronglyConvex;
    f.mu = 2.0;
    f.lipschitz = 2.0 * (1.0 + c.norm());

    Functional g;
    g.value = [c_g, r](const Point& x) { return (x - c_g).squaredNorm() - r * r; };
    g.subgradient = [c_g](const Point& x) -> DualVector { return 2.0 * (x - c_g); };
    g.cls = FunctionClass::StronglyConvex;
    g.mu = 2.0;
    g.lipschitz = 2.0 * (1.0 + c_g.norm());

    StronglyConvexPair out;
    out.problem = make_problem("sc-quadratic", n, std::move(f), std::move(g), FeasibleSet::unit_ball(n));
    out.problem.grad_lipschitz = 2.0;
    const Point shift = c - c_g;
    const double dist = shift.norm();
    out.x_star = dist <= r ? c : Point(c_g + r * shift / dist);
    out.g_star = 2.0 * (out.x_star - c).norm();
    return out;
}

KnownSolution brute_force_optimum(const ConstrainedProblem& problem, const Point& lo, const Point& hi,
                                  const BruteForceOptions& opts)
{
    const auto n = problem.dimension;
    if (n < 1 || n > 3)
        throw ConfigError("brute_force_optimum: dimension must be 1, 2 or 3");
    if (lo.size() != n || hi.size() != n || (lo.array() > hi.array()).any())
        throw ConfigError("brute_force_optimum: invalid box");
    if (!(opts.resolution > 0.0) || opts.coarse_points < 2)
        throw ConfigError("brute_force_optimum: invalid resolution");

    Point best;
    double best_f = std::numeric_limits<double>::infinity();

    // Scans the lattice lo_w + i * step (i = 0..count-1 per axis) in
    // lexicographic order; strict improvement keeps the first point on ties.
    const auto scan = [&](const Point& lo_w, const Point& hi_w, const Eigen::VectorXd& step) {
        Eigen::VectorXi count(n);
        for (Eigen::Index d = 0; d < n; ++d)
            count[d] = static_cast<int>(std::floor((hi_w[d] - lo_w[d]) / step[d] + 1e-9)) + 1;
        Eigen::VectorXi idx = Eigen::VectorXi::Zero(n);
        Point x(n);
        while (true) {
            for (Eigen::Index d = 0; d < n; ++d)
                x[d] = lo_w[d] + idx[d] * step[d];
            if (problem.feasible.contains(x) && problem.g(x) <= 0.0) {
                const double fx = problem.f(x);
                if (fx < best_f) {
                    best_f = fx;
                    best = x;
                }
            }
            Eigen::Index d = n - 1;
            while (d >= 0 && ++idx[d] == count[d]) {
                idx[d] = 0;
                --d;
            }
            if (d < 0)
                break;
        }
    };

    Eigen::VectorXd step(n);
    for (Eigen::Index d = 0; d < n; ++d)
        step[d] = std::max(opts.resolution, (hi[d] - lo[d]) / (opts.coarse_points - 1));
    scan(lo, hi, step);
    if (!std::isfinite(best_f))
        throw InfeasibleError("brute_force_optimum: no feasible grid point in the box");

    while ((step.array() > opts.resolution * (1.0 + 1e-12)).any()) {
        const Eigen::VectorXd fine = (step / 10.0).cwiseMax(opts.resolution);
        const Point lo_w = (best - 2.0 * step).cwiseMax(lo);
        const Point hi_w = (best + 2.0 * step).cwiseMin(hi);
        scan(lo_w, hi_w, fine);
        step = fine;
    }

    KnownSolution out;
    out.x_star = best;
    out.f_star = best_f;
    out.provenance = KnownSolution::Provenance::BruteForce;
    const double mf = problem.objective.lipschitz.value_or(1.0);
    out.accuracy = mf * opts.resolution * std::sqrt(static_cast<double>(n));
    return out;
}

void write_rows(std::ostream& out, const std::vector<Point>& rows)
{
    std::ostringstream line;
    line.precision(17);
    for (const auto& r : rows) {
        line.str({});
        for (Eigen::Index i = 0; i < r.size(); ++i) {
            if (i)
                line << ' ';
            line << r[i];
        }
        out << line.str() << '\n';
    }
}

std::vector<Point> read_rows(std::istream& in)
{
    std::vector<Point> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        std::istringstream ls(line);
        std::vector<double> values;
        double v = 0.0;
        while (ls >> v)
            values.push_back(v);
        if (!ls.eof())
            throw DomainError("read_rows: malformed number in '" + line + "'");
        rows.emplace_back(Eigen::Map<const Point>(values.data(), static_cast<Eigen::Index>(values.size())));
    }
    return rows;
}

void write_matrix(std::ostream& out, const Eigen::MatrixXd& m)
{
    std::vector<Point> rows;
    rows.reserve(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        rows.emplace_back(m.row(i).transpose());
    write_rows(out, rows);
}

Eigen::MatrixXd read_matrix(std::istream& in)
{
    const auto rows = read_rows(in);
    if (rows.empty())
        return {};
    const auto cols = rows.front().size();
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != cols)
            throw DomainError("read_matrix: ragged rows");
        m.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    }
    return m;
}

Point normalized_start(Eigen::Index n)
{
    return Point::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
}

const char* to_string(Family f)
{
    switch (f) {
    case Family::Fts: return "fts";
    case Family::CoveringBall: return "covering-ball";
    case Family::HolderSqrt: return "holder-sqrt";
    case Family::QcCover: return "qc-cover";
    case Family::ScQuadratic: return "sc-quadratic";
    }
    return "?";
}

std::optional<Family> parse_family(const std::string& s)
{
    for (auto f : {Family::Fts, Family::CoveringBall, Family::HolderSqrt, Family::QcCover, Family::ScQuadratic})
        if (s == to_string(f))
            return f;
    return std::nullopt;
}

BenchmarkInstance make_instance(const InstanceSpec& spec)
{
    const auto n = spec.n;
    if (spec.family == Family::ScQuadratic) {
        Rng rng(spec.seed);
        const Point c = uniform_in_ball(rng, Point::Zero(n), 0.9);
        const Point c_g = uniform_in_ball(rng, Point::Zero(n), 0.5);
        auto pair = strongly_convex_pair(c, c_g, 0.3);
        auto problem = pair.problem;
        KnownSolution known{pair.x_star, problem.f(pair.x_star), KnownSolution::Provenance::Analytic, 0.0};
        ProxSetup prox = ProxSetup::euclidean(problem.feasible);
        return BenchmarkInstance{std::move(problem), std::move(prox), Point::Zero(n), known, std::move(pair)};
    }

    Functional constraint = linear_constraints(gen_constraint_matrix(n, spec.m), spec.abs_constraint);
    ConstrainedProblem problem;
    std::optional<KnownSolution> known;
    switch (spec.family) {
    case Family::Fts:
        problem = make_problem("fts", n, fts_objective(integer_cloud(n, spec.points, spec.seed)), std::move(constraint));
        break;
    case Family::CoveringBall:
        problem = make_problem("covering-ball", n, covering_ball_objective(integer_cloud(n, spec.points, spec.seed)),
                               std::move(constraint));
        break;
    case Family::HolderSqrt:
        problem = make_problem("holder-sqrt", n, holder_sqrt_objective(n), std::move(constraint),
                               FeasibleSet::nonneg_ball(1.0));
        problem.holder_nu = 0.5;
        problem.holder_m = 1.0;
        known = KnownSolution{Point::Zero(n), 0.0, KnownSolution::Provenance::Analytic, 0.0};
        break;
    case Family::QcCover:
        problem = make_problem("qc-cover", n,
                               quasiconvex_cover_objective(shell_cloud(n, spec.points, spec.seed, spec.radius), spec.rho),
                               std::move(constraint));
        break;
    case Family::ScQuadratic:
        break;
    }
    const Point x0 = normalized_start(n);
    ProxSetup prox = ProxSetup::euclidean_centered(problem.feasible, x0);
    return BenchmarkInstance{std::move(problem), std::move(prox), x0, known, std::nullopt};
}

} // namespace mdopt
