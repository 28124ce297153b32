#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace mdopt {

/// Primal points x in E. Subgradients and other elements of E* share the
/// representation; the two aliases only document intent at call sites.
using Point = Eigen::VectorXd;
using DualVector = Eigen::VectorXd;

/// Raised when an argument lies outside the domain of a function
/// (negative coordinate under the entropy d.g.f., x outside the orthant for
/// the square-root objective, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Invalid or incomplete configuration: non-positive accuracy, a solver that
/// needs a metadata constant the problem does not carry, etc.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An oracle returned something the algorithm cannot use (a zero constraint
/// subgradient on a non-productive step, a non-finite vector).
class OracleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace mdopt
