#include "mdopt/prox.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace mdopt {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_finite(const Eigen::VectorXd& v, const char* what)
{
    if (!v.allFinite())
        throw DomainError(std::string(what) + " has non-finite entries");
}

} // namespace

FeasibleSet::FeasibleSet(Kind kind) : kind_(std::move(kind)) {}

FeasibleSet FeasibleSet::ball(Point center, double radius)
{
    if (!(radius > 0.0))
        throw ConfigError("ball radius must be positive");
    return FeasibleSet{EuclideanBall{std::move(center), radius}};
}

FeasibleSet FeasibleSet::nonneg_ball(double radius)
{
    if (!(radius > 0.0))
        throw ConfigError("ball radius must be positive");
    return FeasibleSet{NonnegBall{radius}};
}

FeasibleSet FeasibleSet::box(Point lo, Point hi)
{
    if (lo.size() != hi.size() || (lo.array() > hi.array()).any())
        throw ConfigError("box bounds must satisfy lo <= hi");
    return FeasibleSet{Box{std::move(lo), std::move(hi)}};
}

bool FeasibleSet::contains(const Point& x, double tol) const
{
    if (!x.allFinite())
        return false;
    return std::visit(
        overloaded{
            [](const WholeSpace&) { return true; },
            [&](const EuclideanBall& b) { return (x - b.center).norm() <= b.radius + tol; },
            [&](const NonnegBall& b) {
                return (x.size() == 0 || x.minCoeff() >= -tol) && x.norm() <= b.radius + tol;
            },
            [&](const ProbabilitySimplex&) {
                const double slack = tol * std::max<double>(1.0, static_cast<double>(x.size()));
                return x.size() > 0 && x.minCoeff() >= -tol && std::abs(x.sum() - 1.0) <= slack;
            },
            [&](const Box& b) {
                return ((x - b.lo).array() >= -tol).all() && ((b.hi - x).array() >= -tol).all();
            },
        },
        kind_);
}

Point project_simplex(const Point& x)
{
    const auto n = x.size();
    if (n == 0)
        throw DomainError("cannot project onto an empty simplex");
    std::vector<double> sorted(x.data(), x.data() + n);
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double cumulative = 0.0;
    double theta = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        cumulative += sorted[k];
        const double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
        if (sorted[k] - candidate > 0.0)
            theta = candidate;
    }
    return (x.array() - theta).max(0.0).matrix();
}

Point FeasibleSet::project(const Point& x) const
{
    return std::visit(
        overloaded{
            [&](const WholeSpace&) -> Point { return x; },
            [&](const EuclideanBall& b) -> Point {
                const Point shift = x - b.center;
                const double dist = shift.norm();
                if (dist <= b.radius)
                    return x;
                return b.center + shift * (b.radius / dist);
            },
            // Clamping and radial scaling commute on this set, so the
            // composition is the exact projection.
            [&](const NonnegBall& b) -> Point {
                Point z = x.cwiseMax(0.0);
                const double r = z.norm();
                if (r > b.radius)
                    z *= b.radius / r;
                return z;
            },
            [&](const ProbabilitySimplex&) -> Point { return project_simplex(x); },
            [&](const Box& b) -> Point { return x.cwiseMax(b.lo).cwiseMin(b.hi); },
        },
        kind_);
}

ProxSetup::ProxSetup(ProxKind kind, FeasibleSet q, Point center, double scale)
    : kind_(kind), feasible_(std::move(q)), center_(std::move(center)), scale_(scale)
{
}

ProxSetup ProxSetup::euclidean(FeasibleSet q)
{
    return ProxSetup(ProxKind::Euclidean, std::move(q), Point{}, 1.0);
}

ProxSetup ProxSetup::euclidean_centered(FeasibleSet q, Point center)
{
    require_finite(center, "prox center");
    return ProxSetup(ProxKind::Euclidean, std::move(q), std::move(center), 1.0);
}

ProxSetup ProxSetup::entropy()
{
    return ProxSetup(ProxKind::Entropy, FeasibleSet::simplex(), Point{}, 1.0);
}

ProxSetup ProxSetup::rescaled(Point center, double r_sq) const
{
    if (kind_ != ProxKind::Euclidean)
        throw ConfigError("rescaling is only defined for the euclidean d.g.f.");
    if (!(r_sq > 0.0) || !std::isfinite(r_sq))
        throw ConfigError("rescaling radius must be positive");
    const double r = std::sqrt(r_sq);
    // d(y) = 1/2 ||(y - c0) / R0||^2 composed with y = (x - c) / r.
    Point new_center = center_.size() == 0 ? std::move(center) : Point(center + r * center_);
    return ProxSetup(ProxKind::Euclidean, feasible_, std::move(new_center), r * scale_);
}

double ProxSetup::value(const Point& x) const
{
    if (kind_ == ProxKind::Euclidean) {
        const double s2 = scale_ * scale_;
        if (center_.size() == 0)
            return 0.5 * x.squaredNorm() / s2;
        return 0.5 * (x - center_).squaredNorm() / s2;
    }
    double sum = std::log(static_cast<double>(x.size()));
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        if (xi < 0.0 || !std::isfinite(xi))
            throw DomainError("entropy d.g.f. needs nonnegative coordinates");
        if (xi > 0.0)
            sum += xi * std::log(xi);
    }
    return sum;
}

DualVector ProxSetup::gradient(const Point& x) const
{
    if (kind_ == ProxKind::Euclidean) {
        const double s2 = scale_ * scale_;
        if (center_.size() == 0)
            return x / s2;
        return (x - center_) / s2;
    }
    if (x.size() == 0 || !(x.minCoeff() > 0.0))
        throw DomainError("entropy gradient is undefined at a zero coordinate");
    return (x.array().log() + 1.0).matrix();
}

double ProxSetup::bregman(const Point& x, const Point& y) const
{
    if (x.size() != y.size())
        throw DomainError("bregman: dimension mismatch");
    if (kind_ == ProxKind::Euclidean)
        return 0.5 * (y - x).squaredNorm() / (scale_ * scale_);

    if (x.size() == 0 || !(x.minCoeff() > 0.0))
        throw DomainError("entropy bregman divergence needs a strictly positive base point");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double yi = y[i];
        if (yi < 0.0 || !std::isfinite(yi))
            throw DomainError("entropy d.g.f. needs nonnegative coordinates");
        sum += x[i] - yi;
        if (yi > 0.0)
            sum += yi * std::log(yi / x[i]);
    }
    return std::max(sum, 0.0);
}

Point ProxSetup::mirror_step(const Point& x, const DualVector& p) const
{
    if (x.size() != p.size())
        throw DomainError("mirror_step: dimension mismatch");
    require_finite(p, "mirror_step direction");
    if (kind_ == ProxKind::Euclidean)
        return feasible_.project(x - (scale_ * scale_) * p);

    if (x.size() == 0 || !(x.minCoeff() > 0.0))
        throw DomainError("entropy mirror step needs a strictly positive base point");
    // z_i proportional to x_i exp(-p_i), computed in log space.
    Eigen::ArrayXd logits = x.array().log() - p.array();
    logits -= logits.maxCoeff();
    Eigen::ArrayXd z = logits.exp();
    z /= z.sum();
    return z.max(kEntropyFloor).matrix();
}

Point ProxSetup::start_point(Eigen::Index n) const
{
    if (kind_ == ProxKind::Entropy)
        return Point::Constant(n, 1.0 / static_cast<double>(n));
    if (center_.size() != 0)
        return feasible_.project(center_);
    return feasible_.project(Point::Zero(n));
}

double ProxSetup::norm(const Point& v) const
{
    if (kind_ == ProxKind::Euclidean)
        return v.norm() / scale_;
    return v.lpNorm<1>();
}

double ProxSetup::dual_norm(const DualVector& p) const
{
    if (p.size() == 0)
        return 0.0;
    if (kind_ == ProxKind::Euclidean)
        return scale_ * p.norm();
    return p.lpNorm<Eigen::Infinity>();
}

double ProxSetup::lipschitz_in_norm(double l2_constant) const
{
    return kind_ == ProxKind::Euclidean ? scale_ * l2_constant : l2_constant;
}

double dgf_value(const ProxSetup& setup, const Point& x) { return setup.value(x); }
double bregman(const ProxSetup& setup, const Point& x, const Point& y) { return setup.bregman(x, y); }
Point mirror_step(const ProxSetup& setup, const Point& x, const DualVector& p) { return setup.mirror_step(x, p); }
double dual_norm(const ProxSetup& setup, const DualVector& p) { return setup.dual_norm(p); }

} // namespace mdopt
