#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mdopt/bench.hpp"

#include <algorithm>
#include <filesystem>
#include <sstream>

using namespace mdopt;

namespace {

std::vector<std::string> lines_of(const std::string& s)
{
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);)
        out.push_back(l);
    return out;
}

std::string to_csv(const ResultTable& t)
{
    std::ostringstream out;
    emit_table(t, Format::Csv, out);
    return out.str();
}

// CSV with the time column blanked.
std::string without_times(const std::string& csv)
{
    std::string out;
    for (const auto& line : lines_of(csv)) {
        std::vector<std::string> fields;
        std::stringstream ss(line);
        for (std::string f; std::getline(ss, f, ',');)
            fields.push_back(f);
        if (line.back() == ',')
            fields.emplace_back();
        REQUIRE(fields.size() == 5);
        fields[3] = "-";
        for (std::size_t i = 0; i < fields.size(); ++i)
            out += (i ? "," : "") + fields[i];
        out += "\n";
    }
    return out;
}

ExperimentConfig small_config()
{
    std::istringstream in(R"(
[experiment]
name = small
eps = 1/2, 1/4
algorithms = prior, new
theta0_sq = 2
time_limit = 30

[problem.fts]
family = fts
n = 20

[problem.holder]
family = holder-sqrt
n = 20
constraint = plain
)");
    return parse_config(in);
}

} // namespace

TEST_CASE("config parsing")
{
    const auto c = small_config();
    CHECK(c.name == "small");
    REQUIRE(c.eps.size() == 2);
    CHECK(c.eps[1] == 0.25);
    CHECK(c.eps_labels[0] == "1/2");
    REQUIRE(c.problems.size() == 2);
    CHECK(c.problems[0].label == "fts");
    CHECK(c.problems[1].instance.family == Family::HolderSqrt);
    CHECK_FALSE(c.problems[1].instance.abs_constraint);
    CHECK(c.algorithms == std::vector<Method>{Method::Prior, Method::New});

    CHECK(parse_eps("1/6") == doctest::Approx(1.0 / 6));
    CHECK(parse_eps("0.125") == 0.125);
    CHECK_THROWS_AS(parse_eps("1/0"), ConfigError);
    CHECK_THROWS_AS(parse_eps("abc"), ConfigError);
}

TEST_CASE("config errors")
{
    auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return parse_config(in);
    };
    CHECK_THROWS_AS(parse("[experiment]\neps=1/4,1/2\nalgorithms=new\n[problem]\nfamily=fts\nn=20\n"), ConfigError);
    CHECK_THROWS_AS(parse("[experiment]\neps=1/2\nalgorithms=new\n[problem]\nfamily=fts\nn=10\n"), ConfigError);
    CHECK_THROWS_AS(parse("[experiment]\neps=-1\nalgorithms=new\n[problem]\nfamily=fts\nn=20\n"), ConfigError);
    CHECK_THROWS_AS(parse("[experiment]\neps=1/2\nalgorithms=fast\n[problem]\nfamily=fts\nn=20\n"), ConfigError);
    CHECK_THROWS_AS(parse("[experiment]\neps=1/2\nalgorithms=new\ncolour=red\n[problem]\nfamily=fts\nn=20\n"),
                    ConfigError);
    CHECK_THROWS_AS(parse("[experiment]\neps=1/2\nalgorithms=new\n"), ConfigError);
    CHECK_THROWS_AS(parse("[experiment]\neps=1/2\nalgorithms=new\n[problem]\nn=20\n"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.ini"), ConfigError);
    CHECK_NOTHROW(load_config(std::string(MDOPT_TEST_DATA) + "/smoke.ini"));
}

TEST_CASE("config hash")
{
    auto a = small_config();
    auto b = small_config();
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 16);
    b.parallel = 4;
    CHECK(config_hash(a) == config_hash(b));
    b.override_seed(99);
    CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("empty eps list gives an empty table")
{
    auto c = small_config();
    c.eps.clear();
    c.eps_labels.clear();
    const auto t = run_experiment(c);
    CHECK(t.cells.empty());
    CHECK(lines_of(to_csv(t)).size() == 1);
}

TEST_CASE("grid results")
{
    const auto c = small_config();
    const auto t = run_experiment(c);
    REQUIRE(t.columns.size() == 4);
    CHECK(t.columns[1] == "fts/new");
    CHECK(t.at(0, 1).iterations == 16);
    CHECK(t.at(1, 1).iterations == 64);
    CHECK(t.at(0, 1).status == CellStatus::Ok);
    CHECK_FALSE(t.at(0, 1).certified);
    // The square-root instance knows x* = 0 and is certified.
    REQUIRE(t.at(0, 3).certified);
    CHECK(*t.at(0, 3).certified);

    const auto csv = to_csv(t);
    const auto lines = lines_of(csv);
    CHECK(lines.size() == 1 + 2 * 4);
    CHECK(lines[0] == "eps,algorithm,iterations,time_ms,certified");
    CHECK(lines[2].rfind("1/2,fts/new,16,", 0) == 0);

    // Same config, same bytes apart from the time column.
    CHECK(without_times(csv) == without_times(to_csv(run_experiment(c))));
}

TEST_CASE("parallel execution gives the same grid")
{
    auto c = small_config();
    const auto seq = run_experiment(c);
    c.parallel = 3;
    const auto par = run_experiment(c);
    CHECK(without_times(to_csv(seq)) == without_times(to_csv(par)));
}

TEST_CASE("a failing cell does not disturb its neighbours")
{
    std::istringstream in(R"(
[experiment]
eps = 1/2
algorithms = new, restart

[problem]
family = fts
n = 20
)");
    const auto t = run_experiment(parse_config(in));
    CHECK(t.at(0, 0).status == CellStatus::Ok);
    CHECK(t.at(0, 0).iterations == 16);
    CHECK(t.at(0, 1).status == CellStatus::Error);
    CHECK(t.at(0, 1).message.find("strongly convex") != std::string::npos);
    const auto lines = lines_of(to_csv(t));
    CHECK(lines[2] == "1/2,restart,,error,");
}

TEST_CASE("restart cells")
{
    std::istringstream in(R"(
[experiment]
eps = 0.01, 0.001
algorithms = restart, new
theta0_sq = 2

[problem]
family = sc-quadratic
n = 2
)");
    const auto t = run_experiment(parse_config(in));
    for (std::size_t r = 0; r < 2; ++r) {
        CHECK(t.at(r, 0).status == CellStatus::Ok);
        REQUIRE(t.at(r, 0).certified);
        CHECK(*t.at(r, 0).certified);
    }
}

TEST_CASE("timed-out cells")
{
    std::istringstream in(R"(
[experiment]
eps = 1/2
algorithms = prior
time_limit = 0.05

[problem]
family = fts
n = 1000
)");
    const auto t = run_experiment(parse_config(in));
    REQUIRE(t.at(0, 0).status == CellStatus::Timeout);
    const auto lines = lines_of(to_csv(t));
    REQUIRE(lines.size() == 2);
    CHECK(lines[1] == "1/2,prior,,>50,");

    std::ostringstream md;
    emit_table(t, Format::Markdown, md);
    CHECK(md.str().find("| 1/2 | — | >00:00 |") != std::string::npos);
}

TEST_CASE("markdown layout")
{
    ResultTable t;
    t.name = "layout";
    t.eps_labels = {"1/2", "1/4", "1/6", "1/8"};
    t.eps = {0.5, 0.25, 1.0 / 6, 0.125};
    t.columns = {"prior", "new"};
    t.time_limit_s = 300;
    t.cells.resize(8);
    for (std::size_t i = 0; i < 8; ++i) {
        t.cells[i].iterations = i;
        t.cells[i].time_ms = 1500.0;
    }
    t.cells[4].status = CellStatus::Timeout;

    std::ostringstream out;
    emit_table(t, Format::Markdown, out);
    std::vector<std::string> rows;
    for (const auto& l : lines_of(out.str()))
        if (!l.empty() && l[0] == '|')
            rows.push_back(l);
    REQUIRE(rows.size() == 2 + 4);
    for (const auto& r : rows)
        CHECK(std::count(r.begin(), r.end(), '|') == 6);  // 5 columns
    CHECK(rows[4] == "| 1/6 | — | >05:00 | 5 | 00:01.50 |");
    CHECK(out.str().find("config hash") != std::string::npos);

    std::ostringstream again;
    emit_table(t, Format::Markdown, again);
    CHECK(again.str() == out.str());
}

TEST_CASE("one-cell csv")
{
    ResultTable t;
    t.eps_labels = {"1/4"};
    t.eps = {0.25};
    t.columns = {"new"};
    t.cells.resize(1);
    t.cells[0].iterations = 64;
    t.cells[0].time_ms = 0.5;
    t.cells[0].certified = true;
    CHECK(to_csv(t) == "eps,algorithm,iterations,time_ms,certified\n1/4,new,64,0.500,true\n");
}

TEST_CASE("clock formatting")
{
    CHECK(format_clock(300, true) == ">05:00");
    CHECK(format_clock(178.0) == "02:58.00");
    CHECK(format_clock(0.1) == "00:00.10");
    CHECK(format_clock(59.999) == "01:00.00");
}

TEST_CASE("writing to an unwritable path fails")
{
    ResultTable t;
    CHECK_THROWS_AS(emit_table(t, Format::Csv, std::filesystem::path("/nonexistent/dir/out.csv")),
                    std::ios_base::failure);
    const auto tmp = std::filesystem::temp_directory_path() / "mdopt_bench_test.csv";
    emit_table(t, Format::Csv, tmp);
    CHECK(std::filesystem::file_size(tmp) == std::string("eps,algorithm,iterations,time_ms,certified\n").size());
    std::filesystem::remove(tmp);
}

TEST_CASE("presets")
{
    CHECK(preset_names().size() == 5);
    CHECK_THROWS_AS(preset_config("table9"), ConfigError);
    for (const auto& name : preset_names()) {
        const auto c = preset_config(name);
        CHECK(c.theta0_sq == 2.0);
        CHECK(c.seed == 1);
    }
    const auto t5 = preset_config("table5");
    CHECK(t5.eps.size() == 6);
    CHECK(t5.algorithms == std::vector<Method>{Method::Prior, Method::QuasiConvex});
    CHECK(t5.problems[0].instance.points == 100);
    const auto t4 = preset_config("table4");
    CHECK(t4.problems.size() == 3);
    CHECK(t4.problems[0].instance.n == 300000);
}

TEST_CASE("fixed-budget columns of the presets")
{
    // Only the fixed-budget columns; the prior scheme takes minutes here.
    for (const std::string name : {"table1", "table2", "table5"}) {
        auto c = preset_config(name);
        c.algorithms.erase(std::remove(c.algorithms.begin(), c.algorithms.end(), Method::Prior), c.algorithms.end());
        const auto t = run_experiment(c);
        for (std::size_t r = 0; r < c.eps.size(); ++r) {
            CHECK(t.at(r, 0).status == CellStatus::Ok);
            CHECK(t.at(r, 0).iterations == fixed_budget(2.0, c.eps[r]));
        }
        if (name == "table5")
            CHECK(t.at(4, 0).iterations == 400);
    }
}
