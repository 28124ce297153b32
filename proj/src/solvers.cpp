#include "mdopt/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mdopt {

const char* to_string(Algorithm a)
{
    switch (a) {
    case Algorithm::PriorAdaptive: return "prior";
    case Algorithm::NewAdaptive: return "new";
    case Algorithm::QuasiConvex: return "quasiconvex";
    }
    return "?";
}

const char* to_string(StopReason r)
{
    switch (r) {
    case StopReason::Criterion: return "criterion";
    case StopReason::ZeroGradient: return "zero-gradient";
    case StopReason::Cap: return "cap";
    }
    return "?";
}

namespace {

// 2 Theta^2 / eps^2 computed in floating point overshoots an integer by an
// ulp or two for eps = 1/6, 1/12, ...; the ceiling must not see that.
constexpr double kBudgetRelTol = 1e-9;

double budget_target(double theta0_sq, double eps) { return 2.0 * theta0_sq / (eps * eps); }

void validate(const SolverConfig& config)
{
    if (!(config.eps > 0.0) || !std::isfinite(config.eps))
        throw ConfigError("eps must be positive");
    if (!(config.theta0_sq > 0.0) || !std::isfinite(config.theta0_sq))
        throw ConfigError("theta0_sq must be positive");
}

class Loop {
public:
    Loop(Algorithm algorithm, const ConstrainedProblem& problem, const ProxSetup& prox, const SolverConfig& config)
        : algorithm_(algorithm), problem_(problem), prox_(prox), config_(config)
    {
        validate(config);
        if (algorithm == Algorithm::QuasiConvex)
            mg_ = prox.lipschitz_in_norm(problem.require_mg());
        report_.algorithm = algorithm;
        report_.eps = config.eps;
        report_.theta0_sq = config.theta0_sq;
        report_.best_f = std::numeric_limits<double>::infinity();
    }

    RunReport run()
    {
        const auto started = std::chrono::steady_clock::now();
        const double eps = config_.eps;
        const double target = budget_target(config_.theta0_sq, eps) * (1.0 - kBudgetRelTol);
        const std::size_t budget = fixed_budget(config_.theta0_sq, eps);
        const bool want_records = config_.record_trace || static_cast<bool>(config_.observer);

        Point x = config_.x0 ? *config_.x0 : prox_.start_point(problem_.dimension);
        if (x.size() != problem_.dimension)
            throw ConfigError("start point dimension does not match the problem");
        double accumulated = 0.0;  // sum_{j not in I} 1/M_j^2 + |I| for the prior scheme

        for (std::size_t k = 0;; ++k) {
            if (k >= config_.hard_cap) {
                finish(x, started);
                report_.stop_reason = StopReason::Cap;
                throw CapReached("iteration cap reached", std::move(report_));
            }
            if (config_.deadline && std::chrono::steady_clock::now() > *config_.deadline) {
                finish(x, started);
                throw TimeLimitReached("time limit reached", std::move(report_));
            }

            const double gx = problem_.g(x);
            DualVector g_dir;
            bool productive = false;
            switch (algorithm_) {
            case Algorithm::PriorAdaptive:
                productive = gx <= eps;
                break;
            case Algorithm::NewAdaptive:
                g_dir = problem_.constraint.grad(x);
                productive = gx <= eps * prox_.dual_norm(g_dir);
                break;
            case Algorithm::QuasiConvex:
                productive = gx <= mg_ * eps;
                break;
            }

            IterationRecord rec;
            rec.index = k;
            rec.g = gx;

            if (productive) {
                rec.kind = StepKind::Productive;
                rec.direction = algorithm_ == Algorithm::QuasiConvex ? problem_.objective.dir(x)
                                                                     : problem_.objective.grad(x);
                rec.m = prox_.dual_norm(rec.direction);
                rec.f = problem_.f(x);
                ++report_.n_productive;
                if (rec.f < report_.best_f) {
                    report_.best_f = rec.f;
                    report_.best_index = k;
                    report_.x_bar = x;
                }
                if (rec.m == 0.0) {
                    // x minimizes f; no step can improve it.
                    rec.h = 0.0;
                    emit(rec, x, x, want_records);
                    ++report_.n_total;
                    report_.stop_reason = StopReason::ZeroGradient;
                    finish(x, started);
                    return std::move(report_);
                }
                rec.h = eps / rec.m;
                accumulated += 1.0;
            } else {
                rec.kind = StepKind::NonProductive;
                if (algorithm_ == Algorithm::QuasiConvex)
                    rec.direction = problem_.constraint.dir(x);
                else if (algorithm_ == Algorithm::PriorAdaptive)
                    rec.direction = problem_.constraint.grad(x);
                else
                    rec.direction = std::move(g_dir);
                rec.m = prox_.dual_norm(rec.direction);
                if (!(rec.m > 0.0) || !std::isfinite(rec.m))
                    throw OracleError("constraint oracle returned a zero or non-finite direction at a point with g > 0");
                if (algorithm_ == Algorithm::PriorAdaptive) {
                    rec.h = eps / (rec.m * rec.m);
                    accumulated += 1.0 / (rec.m * rec.m);
                } else {
                    rec.h = eps / rec.m;
                }
                ++report_.n_nonproductive;
                if (want_records)
                    rec.f = problem_.f(x);
            }
            if (!std::isfinite(rec.m))
                throw OracleError("objective oracle returned a non-finite direction");

            Point next = prox_.mirror_step(x, rec.h * rec.direction);
            emit(rec, x, next, want_records);
            x = std::move(next);
            ++report_.n_total;

            const bool done = algorithm_ == Algorithm::PriorAdaptive ? accumulated >= target
                                                                     : report_.n_total >= budget;
            if (done)
                break;
        }

        report_.stop_reason = StopReason::Criterion;
        finish(x, started);
        if (report_.n_productive == 0)
            throw InvalidThetaError("no productive step within the budget; Theta0 does not bound V(x0, x*)",
                                    std::move(report_));
        return std::move(report_);
    }

private:
    void emit(IterationRecord& rec, const Point& before, const Point& after, bool want_records)
    {
        if (!want_records)
            return;
        rec.before = before;
        rec.after = after;
        if (config_.observer)
            config_.observer(rec);
        if (config_.record_trace)
            report_.trace.push_back(std::move(rec));
    }

    void finish(const Point& x, std::chrono::steady_clock::time_point started)
    {
        report_.last_point = x;
        if (report_.n_productive > 0)
            report_.g_at_output = problem_.g(report_.x_bar);
        report_.wall_time = std::chrono::duration_cast<std::chrono::nanoseconds>(
            std::chrono::steady_clock::now() - started);
    }

    Algorithm algorithm_;
    const ConstrainedProblem& problem_;
    const ProxSetup& prox_;
    const SolverConfig& config_;
    double mg_ = 0.0;
    RunReport report_;
};

} // namespace

std::size_t fixed_budget(double theta0_sq, double eps)
{
    const double v = budget_target(theta0_sq, eps);
    return static_cast<std::size_t>(std::ceil(v * (1.0 - kBudgetRelTol)));
}

std::size_t prior_budget_bound(double mg, double theta0_sq, double eps)
{
    return fixed_budget(std::max(1.0, mg * mg) * theta0_sq, eps);
}

RunReport solve_prior_adaptive(const ConstrainedProblem& problem, const ProxSetup& prox, const SolverConfig& config)
{
    return Loop(Algorithm::PriorAdaptive, problem, prox, config).run();
}

RunReport solve_new_adaptive(const ConstrainedProblem& problem, const ProxSetup& prox, const SolverConfig& config)
{
    return Loop(Algorithm::NewAdaptive, problem, prox, config).run();
}

RunReport solve_quasiconvex(const ConstrainedProblem& problem, const ProxSetup& prox, const SolverConfig& config)
{
    return Loop(Algorithm::QuasiConvex, problem, prox, config).run();
}

RunReport solve(Algorithm algorithm, const ConstrainedProblem& problem, const ProxSetup& prox,
                const SolverConfig& config)
{
    return Loop(algorithm, problem, prox, config).run();
}

std::optional<std::size_t> Certificate::first_failure() const
{
    if (failures.empty())
        return std::nullopt;
    std::size_t first = failures.front().index;
    for (const auto& f : failures)
        first = std::min(first, f.index);
    return first;
}

Certifier::Certifier(Algorithm algorithm, double eps, const ConstrainedProblem& problem, const ProxSetup& prox,
                     const KnownSolution& known, double tol)
    : algorithm_(algorithm), eps_(eps), tol_(tol), prox_(prox), x_star_(known.x_star)
{
    g_bound_ = algorithm == Algorithm::PriorAdaptive ? eps : eps * prox.lipschitz_in_norm(problem.require_mg());
    cert_.min_vf = std::numeric_limits<double>::infinity();
    cert_.max_g_productive = -std::numeric_limits<double>::infinity();
}

void Certifier::fail(std::size_t index, std::string check, double lhs, double rhs)
{
    cert_.passed = false;
    cert_.failures.push_back({index, std::move(check), lhs, rhs});
}

void Certifier::observe(const IterationRecord& r)
{
    ++cert_.checked;
    const bool productive = r.kind == StepKind::Productive;
    const double pn = prox_.dual_norm(r.direction);

    if (std::abs(pn - r.m) > 1e-12 * std::max(1.0, pn))
        fail(r.index, "recorded M differs from ||p||_*", r.m, pn);

    // Step-size rule.
    if (!(productive && r.m == 0.0)) {
        const bool squared = algorithm_ == Algorithm::PriorAdaptive && !productive;
        const double expected = squared ? eps_ / (r.m * r.m) : eps_ / r.m;
        if (std::abs(r.h - expected) > 1e-12 * expected)
            fail(r.index, "step size", r.h, expected);
    }

    const double v_before = prox_.bregman(r.before, x_star_);
    const double v_after = prox_.bregman(r.after, x_star_);
    const double decrease = v_before - v_after;

    const double lhs = r.h * r.direction.dot(r.before - x_star_);
    const double rhs = 0.5 * r.h * r.h * pn * pn + decrease;
    if (lhs > rhs + tol_)
        fail(r.index, "three-point inequality", lhs, rhs);

    if (productive) {
        any_productive_ = true;
        cert_.min_vf = std::min(cert_.min_vf, normalized_gap(prox_, r.direction, r.before, x_star_));
        cert_.max_g_productive = std::max(cert_.max_g_productive, r.g);
        if (r.g > g_bound_ + tol_)
            fail(r.index, "constraint on productive step", r.g, g_bound_);
    } else {
        const double required = algorithm_ == Algorithm::PriorAdaptive ? eps_ * eps_ / (2.0 * r.m * r.m)
                                                                       : 0.5 * eps_ * eps_;
        if (!(required < decrease + tol_))
            fail(r.index, "non-productive decrease", decrease, required);
    }
}

Certificate Certifier::finish() const
{
    Certificate out = cert_;
    if (!any_productive_) {
        out.passed = false;
        out.failures.push_back({0, "empty productive set", 0.0, 0.0});
    } else if (out.min_vf > eps_ + tol_) {
        out.passed = false;
        out.failures.push_back({0, "min v_f over productive steps", out.min_vf, eps_});
    }
    return out;
}

Certificate certify_run(const RunReport& report, const ConstrainedProblem& problem, const ProxSetup& prox,
                        const KnownSolution& known, double tol)
{
    if (report.trace.empty())
        throw ConfigError("certify_run needs a recorded trace");
    Certifier certifier(report.algorithm, report.eps, problem, prox, known, tol);
    for (const auto& rec : report.trace)
        certifier.observe(rec);
    return certifier.finish();
}

} // namespace mdopt
