#include "mdopt/restart.hpp"

#include <algorithm>
#include <cmath>

namespace mdopt {

double tau(double delta, double g_star, double l)
{
    return std::max(delta * g_star + 0.5 * delta * delta * l, delta);
}

double phi_hat(double eps, double g_star, double l)
{
    if (!(eps > 0.0))
        throw ConfigError("phi_hat: eps must be positive");
    if (g_star < 0.0 || l < 0.0)
        throw ConfigError("phi_hat: G* and L must be nonnegative");
    // tau is the max of two increasing branches, so its inverse is the min of
    // the branch inverses. The quadratic root is written in the
    // cancellation-free form 2 eps / (G* + sqrt(G*^2 + 2 L eps)).
    const double denom = g_star + std::sqrt(g_star * g_star + 2.0 * l * eps);
    if (denom == 0.0)
        return eps;
    return std::min(eps, 2.0 * eps / denom);
}

double phi_hat(double eps, const TauData& data)
{
    if (const auto* exact = std::get_if<ExactTau>(&data))
        return phi_hat(eps, exact->g_star, exact->l);
    const auto& linear = std::get<LinearTau>(data);
    if (!(linear.c_hat > 0.0))
        throw ConfigError("linear tau constant must be positive");
    return eps / linear.c_hat;
}

ProxSetup rescaled_prox(const ProxSetup& base, const Point& center, double r_sq)
{
    return base.rescaled(center, r_sq);
}

int restart_count(double mu, double r0_sq, double eps)
{
    const double ratio = mu * r0_sq / (2.0 * eps);
    if (ratio <= 1.0)
        return 0;
    // log2 of an exact power of two is exact; guard the general case against
    // an ulp of overshoot.
    return static_cast<int>(std::ceil(std::log2(ratio) - 1e-12));
}

double restart_accuracy(double mu, double r0_sq, int p)
{
    return mu * r0_sq / std::ldexp(1.0, p + 1);
}

namespace {

void validate(const RestartConfig& config)
{
    if (!(config.mu > 0.0))
        throw ConfigError("restart: mu must be positive");
    if (!(config.eps > 0.0))
        throw ConfigError("restart: eps must be positive");
    if (!(config.r0_sq > 0.0))
        throw ConfigError("restart: R0^2 must be positive");
    if (!(config.omega_sq > 0.0))
        throw ConfigError("restart: Omega^2 must be positive");
}

} // namespace

IterationBudget iteration_budget(const RestartConfig& config, double mg)
{
    validate(config);
    IterationBudget out;
    out.p_hat = restart_count(config.mu, config.r0_sq, config.eps);
    const double factor = 2.0 * config.omega_sq * std::max(1.0, mg);
    out.theorem_sum = out.p_hat;
    for (int p = 1; p <= out.p_hat; ++p) {
        const double inner = phi_hat(restart_accuracy(config.mu, config.r0_sq, p), config.tau);
        out.theorem_sum += factor / (inner * inner);
    }
    if (std::holds_alternative<LinearTau>(config.tau))
        out.linear_closed_form = out.p_hat + 64.0 * config.omega_sq / (config.mu * config.eps);
    return out;
}

RestartReport restart_solve(const ConstrainedProblem& problem, const ProxSetup& base, const RestartConfig& config)
{
    validate(config);
    const double mg = problem.require_mg();
    const IterationBudget budget = iteration_budget(config, mg);

    RestartReport report;
    report.p_hat = budget.p_hat;
    report.budget_bound = budget.theorem_sum;

    Point x = config.x0.size() != 0 ? config.x0 : base.start_point(problem.dimension);
    if (x.size() != problem.dimension)
        throw ConfigError("restart: x0 dimension does not match the problem");
    if (!problem.feasible.contains(x))
        throw ConfigError("restart: x0 must lie in Q");

    const double theta_sq = config.omega_sq * std::max(1.0, mg);
    double r_prev_sq = config.r0_sq;
    for (int p = 1; p <= budget.p_hat; ++p) {
        RestartRecord rec;
        rec.p = p;
        rec.r_sq = config.r0_sq * std::ldexp(1.0, -p);
        rec.eps_p = restart_accuracy(config.mu, config.r0_sq, p);
        rec.inner_eps = phi_hat(rec.eps_p, config.tau);

        const ProxSetup prox = rescaled_prox(base, x, r_prev_sq);
        SolverConfig inner_config;
        inner_config.eps = rec.inner_eps;
        inner_config.theta0_sq = theta_sq;
        inner_config.hard_cap = config.hard_cap;
        inner_config.record_trace = config.record_inner_traces;
        inner_config.x0 = x;
        inner_config.deadline = config.deadline;
        try {
            rec.inner = solve(config.inner, problem, prox, inner_config);
        } catch (const TimeLimitReached&) {
            throw;
        } catch (const SolverError& e) {
            throw RestartError(p, e.what());
        } catch (const OracleError& e) {
            throw RestartError(p, e.what());
        }
        rec.inner_iterations = rec.inner.n_total;
        rec.x = rec.inner.x_bar;
        x = rec.x;
        r_prev_sq = rec.r_sq;
        report.total_inner_iterations += rec.inner_iterations;
        report.restarts.push_back(std::move(rec));
    }
    report.x_out = x;
    return report;
}

} // namespace mdopt
