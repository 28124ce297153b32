#pragma once

// Restart scheme for mu-strongly (quasi-)convex f and g.
//
// Restart p = 1..p_hat, p_hat = ceil(log2(mu R0^2 / (2 eps))):
//   R_p^2   = R0^2 2^-p
//   eps_p   = mu R_p^2 / 2
//   x^p     = inner solve with accuracy phi_hat(eps_p), Theta^2 = Omega^2 max{1, M_g},
//             d.g.f. d((x - x^{p-1}) / R_{p-1})
//
// phi_hat inverts tau(delta) = max{delta G* + delta^2 L / 2, delta}, the
// objective-gap majorant of an inner run whose v_f-gap is delta.
//
// The inner guarantees are stated in the rescaled norm ||.|| / R_{p-1};
// they transfer to the original norm when R0 <= 1, which is the regime the
// unit-ball bound Omega^2 is written for.

#include "mdopt/oracles.hpp"
#include "mdopt/prox.hpp"
#include "mdopt/solvers.hpp"

#include <chrono>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

namespace mdopt {

/// tau parameters from G* = ||grad f(x*)||_* and the gradient Lipschitz constant L.
struct ExactTau {
    double g_star = 0.0;
    double l = 0.0;
};

/// phi_hat(eps) = eps / c_hat for a user-supplied constant with tau(delta) <= c_hat delta.
struct LinearTau {
    double c_hat = 1.0;
};

using TauData = std::variant<ExactTau, LinearTau>;

struct RestartConfig {
    double eps = 1e-3;
    double mu = 1.0;
    double r0_sq = 1.0;     // ||x0 - x*||^2 <= R0^2
    double omega_sq = 0.5;  // d(x) <= Omega^2 on the unit ball
    TauData tau = ExactTau{};
    Point x0;
    Algorithm inner = Algorithm::NewAdaptive;
    std::size_t hard_cap = 10'000'000;
    bool record_inner_traces = false;
    /// Shared by all inner runs; exceeding it raises TimeLimitReached.
    std::optional<std::chrono::steady_clock::time_point> deadline;
};

struct RestartRecord {
    int p = 0;
    double r_sq = 0.0;        // R_p^2
    double eps_p = 0.0;
    double inner_eps = 0.0;   // phi_hat(eps_p)
    std::size_t inner_iterations = 0;
    Point x;
    RunReport inner;
};

struct RestartReport {
    std::vector<RestartRecord> restarts;
    int p_hat = 0;
    Point x_out;
    std::size_t total_inner_iterations = 0;
    double budget_bound = 0.0;
};

struct IterationBudget {
    int p_hat = 0;
    /// p_hat + sum_p 2 Omega^2 max{1, M_g} / phi_hat(eps_p)^2
    double theorem_sum = 0.0;
    /// p_hat + 64 Omega^2 / (mu eps); only for the LinearTau form.
    std::optional<double> linear_closed_form;
};

/// Restart failure; wraps the inner error with the restart index.
class RestartError : public std::runtime_error {
public:
    RestartError(int restart, const std::string& what)
        : std::runtime_error("restart " + std::to_string(restart) + ": " + what), restart_(restart)
    {
    }
    int restart() const { return restart_; }

private:
    int restart_;
};

double tau(double delta, double g_star, double l);
double phi_hat(double eps, double g_star, double l);
double phi_hat(double eps, const TauData& data);

/// d_p(x) = d((x - center) / R), R = sqrt(r_sq).
ProxSetup rescaled_prox(const ProxSetup& base, const Point& center, double r_sq);

/// ceil(log2(mu R0^2 / (2 eps))), clamped at 0.
int restart_count(double mu, double r0_sq, double eps);

/// eps_p = mu R0^2 / 2^{p+1}
double restart_accuracy(double mu, double r0_sq, int p);

IterationBudget iteration_budget(const RestartConfig& config, double mg);

RestartReport restart_solve(const ConstrainedProblem& problem, const ProxSetup& base, const RestartConfig& config);

} // namespace mdopt
