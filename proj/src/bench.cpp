#include "mdopt/bench.hpp"

#include "mdopt/restart.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace mdopt {

namespace pt = boost::property_tree;

const char* to_string(Method m)
{
    switch (m) {
    case Method::Prior: return "prior";
    case Method::New: return "new";
    case Method::QuasiConvex: return "quasiconvex";
    case Method::Restart: return "restart";
    }
    return "?";
}

std::optional<Method> parse_method(const std::string& s)
{
    for (Method m : {Method::Prior, Method::New, Method::QuasiConvex, Method::Restart})
        if (s == to_string(m))
            return m;
    return std::nullopt;
}

const char* to_string(CellStatus s)
{
    switch (s) {
    case CellStatus::Ok: return "ok";
    case CellStatus::Timeout: return "timeout";
    case CellStatus::Error: return "error";
    }
    return "?";
}

std::optional<Format> parse_format(const std::string& s)
{
    if (s == "csv")
        return Format::Csv;
    if (s == "markdown" || s == "md")
        return Format::Markdown;
    return std::nullopt;
}

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty())
            out.push_back(item);
    }
    return out;
}

double to_double(const std::string& text, const std::string& key)
{
    const std::string t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
        throw ConfigError(fmt::format("{}: not a number: '{}'", key, text));
    return v;
}

template <typename Int>
Int to_int(const std::string& text, const std::string& key)
{
    const std::string t = trim(text);
    Int v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
        throw ConfigError(fmt::format("{}: not an integer: '{}'", key, text));
    return v;
}

bool is_matrix_family(Family f) { return f != Family::ScQuadratic; }

ProblemColumn parse_problem(const std::string& section, const pt::ptree& tree, std::uint64_t default_seed)
{
    ProblemColumn col;
    col.instance.seed = default_seed;
    bool have_family = false;
    for (const auto& [key, node] : tree) {
        const std::string value = node.get_value<std::string>();
        const std::string where = section + "." + key;
        if (key == "label") {
            col.label = trim(value);
        } else if (key == "family") {
            auto f = parse_family(trim(value));
            if (!f)
                throw ConfigError(fmt::format("{}: unknown family '{}'", where, value));
            col.instance.family = *f;
            have_family = true;
        } else if (key == "n") {
            col.instance.n = to_int<long long>(value, where);
        } else if (key == "m") {
            col.instance.m = to_int<long long>(value, where);
        } else if (key == "seed") {
            col.instance.seed = to_int<std::uint64_t>(value, where);
        } else if (key == "constraint") {
            const std::string v = trim(value);
            if (v == "abs")
                col.instance.abs_constraint = true;
            else if (v == "plain")
                col.instance.abs_constraint = false;
            else
                throw ConfigError(fmt::format("{}: expected abs or plain, got '{}'", where, value));
        } else if (key == "points") {
            col.instance.points = to_int<std::size_t>(value, where);
        } else if (key == "rho") {
            col.instance.rho = to_double(value, where);
        } else if (key == "radius") {
            col.instance.radius = to_double(value, where);
        } else {
            throw ConfigError(fmt::format("unknown key '{}'", where));
        }
    }
    if (!have_family)
        throw ConfigError(fmt::format("{}: family is required", section));
    if (col.label.empty())
        col.label = section.size() > 8 ? section.substr(8) : to_string(col.instance.family);
    return col;
}

} // namespace

double parse_eps(const std::string& text)
{
    const std::string t = trim(text);
    const auto slash = t.find('/');
    if (slash == std::string::npos)
        return to_double(t, "eps");
    const double num = to_double(t.substr(0, slash), "eps");
    const double den = to_double(t.substr(slash + 1), "eps");
    if (den == 0.0)
        throw ConfigError("eps: zero denominator in '" + text + "'");
    return num / den;
}

void ExperimentConfig::validate() const
{
    if (problems.empty())
        throw ConfigError("config: at least one [problem] section is required");
    if (algorithms.empty())
        throw ConfigError("config: algorithms list is empty");
    if (eps.size() != eps_labels.size())
        throw ConfigError("config: eps labels do not match eps values");
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (!(eps[i] > 0.0) || !std::isfinite(eps[i]))
            throw ConfigError("config: eps values must be positive");
        if (i > 0 && !(eps[i] < eps[i - 1]))
            throw ConfigError("config: eps values must be strictly decreasing");
        if (eps_labels[i].find_first_of(",|") != std::string::npos)
            throw ConfigError("config: eps labels may not contain ',' or '|'");
    }
    if (!(theta0_sq > 0.0))
        throw ConfigError("config: theta0_sq must be positive");
    if (!(time_limit_s > 0.0))
        throw ConfigError("config: time_limit must be positive");
    if (hard_cap == 0)
        throw ConfigError("config: hard_cap must be positive");
    if (parallel == 0)
        throw ConfigError("config: parallel must be at least 1");
    if (!(restart.r0_sq > 0.0) || !(restart.omega_sq > 0.0))
        throw ConfigError("config: restart r0_sq and omega_sq must be positive");
    if (restart.c_hat && !(*restart.c_hat > 0.0))
        throw ConfigError("config: restart c_hat must be positive");

    std::set<std::string> labels;
    for (const auto& p : problems) {
        const auto& s = p.instance;
        if (!labels.insert(p.label).second)
            throw ConfigError("config: duplicate problem label '" + p.label + "'");
        if (p.label.find_first_of(",|") != std::string::npos)
            throw ConfigError("config: problem labels may not contain ',' or '|'");
        if (s.n < 1)
            throw ConfigError("config: n must be positive");
        if (is_matrix_family(s.family) && (s.m < 4 || s.n < s.m))
            throw ConfigError(fmt::format("config: problem '{}' needs n >= m >= 4 (n = {}, m = {})", p.label, s.n, s.m));
        if ((s.family == Family::Fts || s.family == Family::CoveringBall || s.family == Family::QcCover) &&
            s.points == 0)
            throw ConfigError("config: points must be positive");
        if (s.family == Family::QcCover && !(s.rho > 1.0))
            throw ConfigError("config: rho must exceed 1");
        if (s.family == Family::QcCover && !(s.radius > 0.0))
            throw ConfigError("config: radius must be positive");
    }
}

void ExperimentConfig::override_seed(std::uint64_t s)
{
    seed = s;
    for (auto& p : problems)
        p.instance.seed = s;
}

ExperimentConfig parse_config(std::istream& in)
{
    pt::ptree tree;
    try {
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    ExperimentConfig config;
    config.problems.clear();

    // The experiment seed is the default for problems, so read it first.
    if (auto exp = tree.get_child_optional("experiment"))
        if (auto s = exp->get_optional<std::string>("seed"))
            config.seed = to_int<std::uint64_t>(*s, "experiment.seed");

    bool have_experiment = false;
    for (const auto& [section, body] : tree) {
        if (section == "experiment") {
            have_experiment = true;
            for (const auto& [key, node] : body) {
                const std::string value = node.get_value<std::string>();
                const std::string where = "experiment." + key;
                if (key == "name") {
                    config.name = trim(value);
                } else if (key == "eps") {
                    for (const auto& item : split_list(value)) {
                        config.eps_labels.push_back(item);
                        config.eps.push_back(parse_eps(item));
                    }
                } else if (key == "algorithms") {
                    for (const auto& item : split_list(value)) {
                        auto m = parse_method(item);
                        if (!m)
                            throw ConfigError(fmt::format("{}: unknown algorithm '{}'", where, item));
                        config.algorithms.push_back(*m);
                    }
                } else if (key == "theta0_sq") {
                    config.theta0_sq = to_double(value, where);
                } else if (key == "time_limit") {
                    config.time_limit_s = to_double(value, where);
                } else if (key == "hard_cap") {
                    config.hard_cap = to_int<std::size_t>(value, where);
                } else if (key == "seed") {
                    // read above
                } else if (key == "parallel") {
                    config.parallel = to_int<unsigned>(value, where);
                } else if (key == "caveat") {
                    config.caveat = trim(value);
                } else if (key == "csv") {
                    config.csv_path = trim(value);
                } else if (key == "markdown") {
                    config.markdown_path = trim(value);
                } else {
                    throw ConfigError(fmt::format("unknown key '{}'", where));
                }
            }
        } else if (section == "restart") {
            for (const auto& [key, node] : body) {
                const std::string value = node.get_value<std::string>();
                const std::string where = "restart." + key;
                if (key == "r0_sq")
                    config.restart.r0_sq = to_double(value, where);
                else if (key == "omega_sq")
                    config.restart.omega_sq = to_double(value, where);
                else if (key == "c_hat")
                    config.restart.c_hat = to_double(value, where);
                else
                    throw ConfigError(fmt::format("unknown key '{}'", where));
            }
        } else if (section == "problem" || section.rfind("problem.", 0) == 0) {
            config.problems.push_back(parse_problem(section, body, config.seed));
        } else {
            throw ConfigError(fmt::format("unknown section '[{}]'", section));
        }
    }
    if (!have_experiment)
        throw ConfigError("config: missing [experiment] section");
    config.validate();
    return config;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read config file " + path.string());
    return parse_config(in);
}

std::string canonical_text(const ExperimentConfig& c)
{
    std::string out;
    auto line = [&out](const std::string& key, const std::string& value) { out += key + "=" + value + "\n"; };
    auto num = [](double v) { return fmt::format("{:.17g}", v); };

    line("name", c.name);
    std::string eps;
    for (std::size_t i = 0; i < c.eps.size(); ++i)
        eps += (i ? "," : "") + c.eps_labels[i] + ":" + num(c.eps[i]);
    line("eps", eps);
    std::string algs;
    for (std::size_t i = 0; i < c.algorithms.size(); ++i)
        algs += (i ? "," : "") + std::string(to_string(c.algorithms[i]));
    line("algorithms", algs);
    line("theta0_sq", num(c.theta0_sq));
    line("time_limit", num(c.time_limit_s));
    line("hard_cap", std::to_string(c.hard_cap));
    line("seed", std::to_string(c.seed));
    line("restart", num(c.restart.r0_sq) + "," + num(c.restart.omega_sq) + "," +
                        (c.restart.c_hat ? num(*c.restart.c_hat) : std::string("exact")));
    for (const auto& p : c.problems) {
        const auto& s = p.instance;
        line("problem", fmt::format("{},{},{},{},{},{},{},{},{}", p.label, to_string(s.family), s.n, s.m, s.seed,
                                    s.abs_constraint ? "abs" : "plain", s.points, num(s.rho), num(s.radius)));
    }
    return out;
}

std::string config_hash(const ExperimentConfig& config)
{
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char ch : canonical_text(config)) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return fmt::format("{:016x}", h);
}

namespace {

Algorithm solver_for(Method m)
{
    switch (m) {
    case Method::Prior: return Algorithm::PriorAdaptive;
    case Method::QuasiConvex: return Algorithm::QuasiConvex;
    default: return Algorithm::NewAdaptive;
    }
}

struct Task {
    std::size_t row;
    std::size_t column;
    std::size_t problem;
    Method method;
    double eps;
};

void run_restart_cell(const BenchmarkInstance& inst, const ExperimentConfig& config, double eps,
                      std::chrono::steady_clock::time_point deadline, Cell& cell)
{
    if (!inst.strongly_convex)
        throw ConfigError("restart needs a strongly convex instance (family sc-quadratic)");
    const auto& pair = *inst.strongly_convex;
    RestartConfig rc;
    rc.eps = eps;
    rc.mu = pair.mu;
    rc.r0_sq = config.restart.r0_sq;
    rc.omega_sq = config.restart.omega_sq;
    if (config.restart.c_hat)
        rc.tau = LinearTau{*config.restart.c_hat};
    else
        rc.tau = ExactTau{pair.g_star, pair.l};
    rc.x0 = inst.x0;
    rc.hard_cap = config.hard_cap;
    rc.deadline = deadline;
    const auto report = restart_solve(inst.problem, inst.prox, rc);
    cell.iterations = report.total_inner_iterations;
    cell.best_f = inst.problem.f(report.x_out);
    cell.g_at_output = inst.problem.g(report.x_out);
    if (inst.known) {
        const double mg = inst.problem.require_mg();
        cell.certified = cell.best_f - inst.known->f_star <= eps + 1e-9 && cell.g_at_output <= mg * eps + 1e-9;
    }
}

Cell run_cell(const Task& task, const BenchmarkInstance& inst, const ExperimentConfig& config)
{
    Cell cell;
    cell.row = task.row;
    cell.column = task.column;
    const auto started = std::chrono::steady_clock::now();
    const auto deadline =
        started + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                      std::chrono::duration<double>(config.time_limit_s));
    try {
        if (task.method == Method::Restart) {
            run_restart_cell(inst, config, task.eps, deadline, cell);
        } else {
            const Algorithm alg = solver_for(task.method);
            SolverConfig sc;
            sc.eps = task.eps;
            sc.theta0_sq = config.theta0_sq;
            sc.hard_cap = config.hard_cap;
            sc.deadline = deadline;
            sc.x0 = inst.x0;
            std::optional<Certifier> certifier;
            if (inst.known) {
                certifier.emplace(alg, task.eps, inst.problem, inst.prox, *inst.known);
                sc.observer = [&certifier](const IterationRecord& r) { certifier->observe(r); };
            }
            const RunReport report = solve(alg, inst.problem, inst.prox, sc);
            cell.iterations = report.n_total;
            cell.stop = report.stop_reason;
            cell.best_f = report.best_f;
            cell.g_at_output = report.g_at_output;
            if (certifier)
                cell.certified = certifier->finish().passed;
        }
    } catch (const TimeLimitReached& e) {
        cell.status = CellStatus::Timeout;
        cell.iterations = e.partial().n_total;
        cell.message = e.what();
    } catch (const std::exception& e) {
        cell.status = CellStatus::Error;
        cell.message = e.what();
    }
    cell.time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    return cell;
}

} // namespace

ResultTable run_experiment(const ExperimentConfig& config)
{
    config.validate();

    ResultTable table;
    table.name = config.name;
    table.eps = config.eps;
    table.eps_labels = config.eps_labels;
    table.seed = config.seed;
    table.config_hash = config_hash(config);
    table.caveat = config.caveat;
    table.time_limit_s = config.time_limit_s;

    std::vector<Task> tasks;
    for (std::size_t p = 0; p < config.problems.size(); ++p)
        for (Method m : config.algorithms) {
            const std::size_t column = table.columns.size();
            table.columns.push_back(config.problems.size() == 1 ? std::string(to_string(m))
                                                                : config.problems[p].label + "/" + to_string(m));
            for (std::size_t r = 0; r < config.eps.size(); ++r)
                tasks.push_back({r, column, p, m, config.eps[r]});
        }
    table.cells.resize(config.eps.size() * table.columns.size());
    if (tasks.empty())
        return table;

    // Instances are built once and only read by the cells.
    std::vector<std::optional<BenchmarkInstance>> instances(config.problems.size());
    std::vector<std::string> instance_errors(config.problems.size());
    for (std::size_t p = 0; p < config.problems.size(); ++p) {
        try {
            instances[p] = make_instance(config.problems[p].instance);
        } catch (const std::exception& e) {
            instance_errors[p] = e.what();
        }
    }

    auto execute = [&](const Task& task) {
        Cell cell;
        if (instances[task.problem]) {
            cell = run_cell(task, *instances[task.problem], config);
        } else {
            cell.row = task.row;
            cell.column = task.column;
            cell.status = CellStatus::Error;
            cell.message = instance_errors[task.problem];
        }
        table.cells[task.row * table.columns.size() + task.column] = std::move(cell);
    };

    const unsigned workers = std::min<std::size_t>(config.parallel, tasks.size());
    if (workers <= 1) {
        for (const auto& task : tasks)
            execute(task);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i; (i = next.fetch_add(1)) < tasks.size();)
                    execute(tasks[i]);
            });
        for (auto& t : pool)
            t.join();
    }
    return table;
}

std::string format_clock(double seconds, bool limit)
{
    if (limit) {
        const long long s = std::llround(seconds);
        return fmt::format(">{:02d}:{:02d}", s / 60, s % 60);
    }
    const long long cs = std::llround(seconds * 100.0);
    return fmt::format("{:02d}:{:02d}.{:02d}", cs / 6000, (cs % 6000) / 100, cs % 100);
}

void emit_metadata(const ResultTable& table, std::ostream& out)
{
    out << "experiment: " << table.name << "\n";
    out << "seed: " << table.seed << "\n";
    out << "config hash: " << table.config_hash << "\n";
    out << "time limit per cell: " << fmt::format("{:g}", table.time_limit_s) << " s\n";
    out << "timing: wall-clock on this host, informative only\n";
    if (!table.caveat.empty())
        out << "caveat: " << table.caveat << "\n";
}

namespace {

void emit_csv(const ResultTable& table, std::ostream& out)
{
    out << "eps,algorithm,iterations,time_ms,certified\n";
    const std::string limit = fmt::format(">{:.0f}", table.time_limit_s * 1000.0);
    for (std::size_t r = 0; r < table.eps.size(); ++r)
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            const Cell& cell = table.at(r, c);
            std::string iterations, time;
            switch (cell.status) {
            case CellStatus::Ok:
                iterations = std::to_string(cell.iterations);
                time = fmt::format("{:.3f}", cell.time_ms);
                break;
            case CellStatus::Timeout: time = limit; break;
            case CellStatus::Error: time = "error"; break;
            }
            const std::string certified = cell.certified ? (*cell.certified ? "true" : "false") : "";
            out << table.eps_labels[r] << ',' << table.columns[c] << ',' << iterations << ',' << time << ','
                << certified << '\n';
        }
}

void emit_markdown(const ResultTable& table, std::ostream& out)
{
    out << "### " << table.name << "\n\n";
    std::ostringstream meta;
    emit_metadata(table, meta);
    std::istringstream lines(meta.str());
    for (std::string l; std::getline(lines, l);)
        if (l.rfind("experiment:", 0) != 0)
            out << "- " << l << "\n";
    out << "\n| ε |";
    for (const auto& c : table.columns)
        out << ' ' << c << " iterations | " << c << " time |";
    out << "\n|---|";
    for (std::size_t c = 0; c < table.columns.size(); ++c)
        out << "---:|---:|";
    out << "\n";
    const std::string limit = format_clock(table.time_limit_s, true);
    for (std::size_t r = 0; r < table.eps.size(); ++r) {
        out << "| " << table.eps_labels[r] << " |";
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            const Cell& cell = table.at(r, c);
            switch (cell.status) {
            case CellStatus::Ok: {
                std::string it = std::to_string(cell.iterations);
                if (cell.certified && !*cell.certified)
                    it += " (certificate failed)";
                out << ' ' << it << " | " << format_clock(cell.time_ms / 1000.0) << " |";
                break;
            }
            case CellStatus::Timeout: out << " — | " << limit << " |"; break;
            case CellStatus::Error: out << " error | — |"; break;
            }
        }
        out << "\n";
    }
}

} // namespace

void emit_table(const ResultTable& table, Format format, std::ostream& out)
{
    if (format == Format::Csv)
        emit_csv(table, out);
    else
        emit_markdown(table, out);
}

void emit_table(const ResultTable& table, Format format, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::ios_base::failure("cannot open " + path.string() + " for writing");
    emit_table(table, format, out);
    out.flush();
    if (!out)
        throw std::ios_base::failure("write to " + path.string() + " failed");
}

std::vector<std::string> preset_names() { return {"table1", "table2", "table3", "table4", "table5"}; }

ExperimentConfig preset_config(const std::string& preset)
{
    const std::string prior_caveat =
        "prior-scheme counts depend on the generated point clouds and agree with published figures in order of "
        "magnitude only";

    ExperimentConfig c;
    c.name = preset;
    c.theta0_sq = 2.0;
    c.time_limit_s = 300.0;
    c.seed = 1;

    InstanceSpec base;
    base.n = 1000;
    base.m = 20;
    base.seed = c.seed;
    base.points = 5;

    if (preset == "table1" || preset == "table2" || preset == "table3") {
        c.eps_labels = {"1/2", "1/4", "1/6", "1/8"};
        c.algorithms = {Method::Prior, Method::New};
        InstanceSpec s = base;
        if (preset == "table1") {
            s.family = Family::Fts;
        } else if (preset == "table2") {
            s.family = Family::CoveringBall;
        } else {
            s.family = Family::HolderSqrt;
            s.abs_constraint = false;
        }
        c.problems = {{to_string(s.family), s}};
        c.caveat = prior_caveat;
        if (preset == "table3")
            c.caveat += "; the new scheme stops early once it reaches the exact minimizer x = 0 (zero gradient)";
    } else if (preset == "table4") {
        c.eps_labels = {"1/2", "1/4", "1/6"};
        c.algorithms = {Method::New};
        c.time_limit_s = 600.0;
        InstanceSpec s = base;
        s.n = 300000;
        s.family = Family::Fts;
        c.problems.push_back({"fts", s});
        s.family = Family::CoveringBall;
        c.problems.push_back({"covering-ball", s});
        s.family = Family::HolderSqrt;
        s.abs_constraint = false;
        c.problems.push_back({"holder-sqrt", s});
        c.caveat = "the holder-sqrt column stops early once it reaches the exact minimizer x = 0 (zero gradient)";
    } else if (preset == "table5") {
        c.eps_labels = {"1/2", "1/4", "1/6", "1/8", "1/10", "1/12"};
        c.algorithms = {Method::Prior, Method::QuasiConvex};
        InstanceSpec s = base;
        s.family = Family::QcCover;
        s.abs_constraint = false;
        s.points = 100;
        s.rho = 2.0;
        s.radius = 1.0;
        c.problems = {{"qc-cover", s}};
        c.caveat = prior_caveat;
    } else {
        std::string names;
        for (const auto& n : preset_names())
            names += (names.empty() ? "" : ", ") + n;
        throw ConfigError("unknown preset '" + preset + "' (expected one of " + names + ")");
    }
    for (const auto& label : c.eps_labels)
        c.eps.push_back(parse_eps(label));
    c.validate();
    return c;
}

ResultTable reproduce(const std::string& preset) { return run_experiment(preset_config(preset)); }

} // namespace mdopt
