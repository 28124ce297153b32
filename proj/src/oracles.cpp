#include "mdopt/oracles.hpp"

#include "mdopt/random.hpp"

#include <cmath>

namespace mdopt {

bool is_quasiconvex_only(FunctionClass c)
{
    return c == FunctionClass::QuasiConvex || c == FunctionClass::StronglyQuasiConvex;
}

double ConstrainedProblem::require_mg() const
{
    if (!constraint.lipschitz)
        throw ConfigError("problem '" + name + "' does not declare the constraint Lipschitz constant M_g");
    return *constraint.lipschitz;
}

double ConstrainedProblem::require_mf() const
{
    if (!objective.lipschitz)
        throw ConfigError("problem '" + name + "' does not declare the objective Lipschitz constant M_f");
    return *objective.lipschitz;
}

bool is_consistent(const ConstrainedProblem& problem, const KnownSolution& known, double tol)
{
    return problem.g(known.x_star) <= tol && std::abs(problem.f(known.x_star) - known.f_star) <= tol;
}

double normalized_gap(const ProxSetup& prox, const DualVector& p, const Point& y, const Point& x_star)
{
    const double pn = prox.dual_norm(p);
    if (pn == 0.0)
        return 0.0;
    return p.dot(y - x_star) / pn;
}

double vf_gap(const ConstrainedProblem& problem, const ProxSetup& prox, const Point& y, const Point& x_star)
{
    return normalized_gap(prox, problem.objective.dir(y), y, x_star);
}

double vf_gap(const ConstrainedProblem& problem, const Point& y, const Point& x_star)
{
    static const ProxSetup plain = ProxSetup::euclidean();
    return vf_gap(problem, plain, y, x_star);
}

double holder_majorant(double m_nu, double nu, double eps)
{
    if (!(m_nu > 0.0) || !(eps > 0.0) || nu < 0.0 || nu > 1.0)
        throw ConfigError("holder_majorant: need M_nu > 0, eps > 0, nu in [0, 1]");
    return std::pow(m_nu, 2.0 / (1.0 + nu)) / (2.0 * std::pow(eps, (1.0 - nu) / (1.0 + nu)));
}

double holder_bound(double m_nu, double nu, double eps)
{
    if (!(m_nu > 0.0) || !(eps > 0.0) || nu < 0.0 || nu > 1.0)
        throw ConfigError("holder_bound: need M_nu > 0, eps > 0, nu in [0, 1]");
    return 0.5 * std::pow(m_nu, 2.0 / (1.0 + nu)) * std::pow(eps, 1.0 + 2.0 * nu / (1.0 + nu)) + eps;
}

SubgradientReport check_subgradient(const Functional& fn, const FeasibleSet& q, const Point& x,
                                    const SubgradientCheckOptions& opts)
{
    SubgradientReport report;
    Rng rng(opts.seed);
    const double fx = fn.value(x);
    const bool level_set_check = is_quasiconvex_only(fn.cls);
    const DualVector p = level_set_check ? fn.dir(x) : fn.grad(x);

    for (int t = 0; t < opts.trials; ++t) {
        const Point y = q.project(uniform_in_ball(rng, x, opts.radius));
        const double fy = fn.value(y);
        double slack = 0.0;
        if (level_set_check) {
            if (fy > fx)
                continue;
            slack = p.dot(x - y);
        } else if (fn.cls == FunctionClass::Concave) {
            slack = fx + p.dot(y - x) - fy;
        } else {
            slack = fy - fx - p.dot(y - x);
        }
        ++report.checked;
        if (slack < -opts.tol && slack < report.worst) {
            report.passed = false;
            report.worst = slack;
            report.worst_sample = y;
        }
    }
    return report;
}

SubgradientReport check_subgradient(const ConstrainedProblem& problem, const Point& x,
                                    const SubgradientCheckOptions& opts)
{
    return check_subgradient(problem.objective, problem.feasible, x, opts);
}

} // namespace mdopt
