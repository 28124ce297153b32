#pragma once

// Experiment grids: (problem, algorithm) columns against an eps list, with a
// per-cell time limit, optional parallel execution, and CSV / markdown output.
//
// Config format (INI):
//
//   [experiment]
//   name       = table1
//   eps        = 1/2, 1/4, 1/6, 1/8
//   algorithms = prior, new
//   theta0_sq  = 2
//   time_limit = 300
//   seed       = 1
//
//   [problem]            ; or [problem.<label>], one section per problem
//   family     = fts
//   n          = 1000
//
// See the README for the full key list.

#include "mdopt/problems.hpp"
#include "mdopt/solvers.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mdopt {

enum class Method { Prior, New, QuasiConvex, Restart };

const char* to_string(Method m);
std::optional<Method> parse_method(const std::string& s);

struct ProblemColumn {
    std::string label;
    InstanceSpec instance;
};

struct RestartParams {
    double r0_sq = 1.0;
    double omega_sq = 0.5;
    /// When set, phi_hat(eps) = eps / c_hat; otherwise G* and L of the instance.
    std::optional<double> c_hat;
};

struct ExperimentConfig {
    std::string name = "experiment";
    std::vector<ProblemColumn> problems;
    std::vector<Method> algorithms;
    std::vector<double> eps;
    std::vector<std::string> eps_labels;
    double theta0_sq = 2.0;
    double time_limit_s = 300.0;
    std::size_t hard_cap = 1'000'000'000;
    std::uint64_t seed = 1;
    unsigned parallel = 1;
    std::string caveat;
    RestartParams restart;
    std::string csv_path;
    std::string markdown_path;

    /// Throws ConfigError.
    void validate() const;
    /// Sets every problem seed.
    void override_seed(std::uint64_t s);
};

/// Parse an INI config; throws ConfigError on unknown keys or bad values.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

/// "1/4" or a decimal literal.
double parse_eps(const std::string& text);

/// Canonical text of the fields that determine the results.
std::string canonical_text(const ExperimentConfig& config);
/// 64-bit FNV-1a of canonical_text, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

enum class CellStatus { Ok, Timeout, Error };

const char* to_string(CellStatus s);

struct Cell {
    std::size_t row = 0;
    std::size_t column = 0;
    CellStatus status = CellStatus::Ok;
    std::size_t iterations = 0;
    double time_ms = 0.0;
    std::optional<bool> certified;
    StopReason stop = StopReason::Criterion;
    double best_f = 0.0;
    double g_at_output = 0.0;
    std::string message;
};

struct ResultTable {
    std::string name;
    std::vector<std::string> eps_labels;
    std::vector<double> eps;
    std::vector<std::string> columns;  // "<method>" or "<problem>/<method>"
    std::vector<Cell> cells;           // row-major, eps x columns
    std::uint64_t seed = 0;
    std::string config_hash;
    std::string caveat;
    double time_limit_s = 0.0;

    const Cell& at(std::size_t row, std::size_t column) const { return cells.at(row * columns.size() + column); }
};

/// Runs every (eps, column) cell. Cell failures are recorded, not thrown.
ResultTable run_experiment(const ExperimentConfig& config);

enum class Format { Csv, Markdown };

std::optional<Format> parse_format(const std::string& s);

void emit_table(const ResultTable& table, Format format, std::ostream& out);
/// Throws std::ios_base::failure when the path cannot be written.
void emit_table(const ResultTable& table, Format format, const std::filesystem::path& path);

/// Seed, config hash and caveat as "key: value" lines.
void emit_metadata(const ResultTable& table, std::ostream& out);

/// "MM:SS.ss", or ">MM:SS" for a limit.
std::string format_clock(double seconds, bool limit = false);

std::vector<std::string> preset_names();
/// Throws ConfigError for an unknown preset.
ExperimentConfig preset_config(const std::string& preset);
ResultTable reproduce(const std::string& preset);

} // namespace mdopt
