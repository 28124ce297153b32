#pragma once

// Adaptive Mirror Descent for  f(x) -> min, x in Q, g(x) <= 0.
//
//   solve_prior_adaptive : productive iff g <= eps; steps eps/||grad f||_* and
//                          eps/||grad g||_*^2; stops once
//                          sum_{j not in I} 1/M_j^2 + |I| >= 2 Theta0^2 / eps^2.
//   solve_new_adaptive   : productive iff g <= eps ||grad g||_*; both steps are
//                          eps/M; runs exactly ceil(2 Theta0^2 / eps^2) steps.
//   solve_quasiconvex    : productive iff g <= M_g eps; steps along level-set
//                          normals Df, Dg with eps/||D.||_*; same budget.
//
// All three output the productive iterate with the smallest f (lowest index
// on ties).

#include "mdopt/oracles.hpp"
#include "mdopt/prox.hpp"

#include <chrono>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mdopt {

enum class Algorithm { PriorAdaptive, NewAdaptive, QuasiConvex };
enum class StepKind { Productive, NonProductive };
enum class StopReason { Criterion, ZeroGradient, Cap };

const char* to_string(Algorithm a);
const char* to_string(StopReason r);

struct IterationRecord {
    std::size_t index = 0;
    StepKind kind = StepKind::Productive;
    double m = 0.0;          // ||p||_* of the branch's direction
    double h = 0.0;          // step size; the mirror step uses h * direction
    DualVector direction;
    Point before;
    Point after;
    double f = 0.0;
    double g = 0.0;
};

struct SolverConfig {
    double eps = 0.1;
    double theta0_sq = 1.0;
    std::size_t hard_cap = 10'000'000;
    bool record_trace = false;
    /// Checked once per iteration; exceeding it raises TimeLimitReached.
    std::optional<std::chrono::steady_clock::time_point> deadline;
    /// Called with every iteration record (independent of record_trace).
    std::function<void(const IterationRecord&)> observer;
    /// Starting point; defaults to argmin_Q d.
    std::optional<Point> x0;
};

struct RunReport {
    Algorithm algorithm = Algorithm::NewAdaptive;
    double eps = 0.0;
    double theta0_sq = 0.0;

    Point x_bar;
    std::size_t best_index = 0;
    double best_f = 0.0;
    double g_at_output = 0.0;

    std::size_t n_total = 0;
    std::size_t n_productive = 0;
    std::size_t n_nonproductive = 0;
    StopReason stop_reason = StopReason::Criterion;
    std::chrono::nanoseconds wall_time{0};

    Point last_point;
    std::vector<IterationRecord> trace;
};

/// Base for solver failures that still carry the work done so far.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, RunReport partial)
        : std::runtime_error(what), partial_(std::move(partial))
    {
    }
    const RunReport& partial() const { return partial_; }

private:
    RunReport partial_;
};

class CapReached : public SolverError {
public:
    using SolverError::SolverError;
};

class TimeLimitReached : public SolverError {
public:
    using SolverError::SolverError;
};

/// No productive step after the full budget. Cannot happen when
/// V(x0, x*) <= Theta0^2, so it signals an invalid Theta0.
class InvalidThetaError : public SolverError {
public:
    using SolverError::SolverError;
};

/// ceil(2 theta0_sq / eps^2), robust to the rounding of eps = 1/k.
std::size_t fixed_budget(double theta0_sq, double eps);

/// ceil(2 max{1, M_g^2} theta0_sq / eps^2).
std::size_t prior_budget_bound(double mg, double theta0_sq, double eps);

RunReport solve_prior_adaptive(const ConstrainedProblem& problem, const ProxSetup& prox, const SolverConfig& config);
RunReport solve_new_adaptive(const ConstrainedProblem& problem, const ProxSetup& prox, const SolverConfig& config);
RunReport solve_quasiconvex(const ConstrainedProblem& problem, const ProxSetup& prox, const SolverConfig& config);

RunReport solve(Algorithm algorithm, const ConstrainedProblem& problem, const ProxSetup& prox,
                const SolverConfig& config);

struct CertificateFailure {
    std::size_t index = 0;
    std::string check;
    double lhs = 0.0;
    double rhs = 0.0;
};

struct Certificate {
    bool passed = true;
    std::size_t checked = 0;
    double min_vf = 0.0;            // over productive steps
    double max_g_productive = 0.0;
    std::vector<CertificateFailure> failures;

    /// Index of the first failing iteration, if any.
    std::optional<std::size_t> first_failure() const;
};

/// Streaming per-step verification against a known solution x*:
///
///   step formula     h matches the branch rule for the algorithm
///   three-point      h <p, x^k - x*> <= h^2/2 ||p||_*^2 + V(x^k,x*) - V(x^{k+1},x*)
///   decrease         non-productive steps shrink V(., x*) by more than
///                    eps^2/2 (eps^2 / (2 M^2) for the prior scheme)
///   constraint       g(x^k) <= eps M_g on productive steps (eps for the prior
///                    scheme)
///   gap              min over productive steps of v_f(x^k, x*) <= eps
///
/// The guarantee on g for the new schemes is stated for the productive
/// iterates themselves; the weighted average of g used in the convergence
/// argument is implied by it and is not checked separately.
class Certifier {
public:
    Certifier(Algorithm algorithm, double eps, const ConstrainedProblem& problem, const ProxSetup& prox,
              const KnownSolution& known, double tol = 1e-9);

    void observe(const IterationRecord& record);
    Certificate finish() const;

private:
    void fail(std::size_t index, std::string check, double lhs, double rhs);

    Algorithm algorithm_;
    double eps_;
    double tol_;
    double g_bound_;
    ProxSetup prox_;
    Point x_star_;
    Certificate cert_;
    bool any_productive_ = false;
};

Certificate certify_run(const RunReport& report, const ConstrainedProblem& problem, const ProxSetup& prox,
                        const KnownSolution& known, double tol = 1e-9);

} // namespace mdopt
