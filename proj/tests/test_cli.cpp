#include "doctest.h"

#include "warpheat/config.hpp"
#include "warpheat/output.hpp"

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace warpheat;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    fs::path p = fs::temp_directory_path() / ("warpheat_cli_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Run {
    int code;
    std::string err;
};

Run run_cli(const std::string& args, const fs::path& dir)
{
    const fs::path err = dir / "stderr.txt";
    std::string cmd = std::string(WARPHEAT_CLI) + " " + args + " 2> " + err.string() + " > " +
                      (dir / "stdout.txt").string();
    int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(err)};
}

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

} // namespace

TEST_CASE("configuration round trip")
{
    RunConfig c;
    CHECK(RunConfig::parse(c.serialize()) == c);
    c.profile = "cone-5.5";
    c.eta1 = 0.55;
    c.times = {0.25, 3};
    c.surrogate_alphas = {6, 5};
    c.surrogate_bounds = {2};
    c.slack = 1e-9;
    RunConfig back = RunConfig::parse(c.serialize());
    CHECK(back == c);
    CHECK(back.serialize() == c.serialize());
    CHECK(RunConfig::parse("# comment only\n\n") == RunConfig{});
    CHECK(RunConfig::parse("eta1 = 0.5   # trailing\n").eta1 == 0.5);
}

TEST_CASE("configuration errors")
{
    CHECK_THROWS_AS(RunConfig::parse("no_such_key = 1\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse("eta1 = 0.5\neta1 = 0.55\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse("n_bands = 11\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse("n_bands = 3\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse("slack = 1e-3\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse("eta1 = abc\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse("threads = 1.5\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse("times = 2, 1\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse("just words\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::load("/nonexistent/warpheat.cfg"), ConfigError);
    RunConfig c;
    c.eta1 = 0.7;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    RunConfig d;
    d.surrogate_bounds = {1};
    CHECK_THROWS_AS(d.validate(), ConfigError);
    RunConfig e;
    CHECK_THROWS_AS(e.set("eigen_count", "-3"), ConfigError);
    e.set("eigen_count", "12");
    CHECK(e.eigen_count == 12);
}

TEST_CASE("profile choice")
{
    CHECK(ProfileChoice::parse("example").kind == ProfileKind::example);
    CHECK(ProfileChoice::parse("surrogate").kind == ProfileKind::surrogate);
    ProfileChoice e = ProfileChoice::parse("euclidean-3");
    CHECK(e.kind == ProfileKind::euclidean);
    CHECK(e.parameter == 3);
    ProfileChoice c = ProfileChoice::parse("cone-5.5");
    CHECK(c.kind == ProfileKind::cone);
    CHECK(c.parameter == 5.5);
    for (const char* s : {"example", "surrogate", "euclidean-8", "cone-5.5"})
        CHECK(ProfileChoice::parse(s).str() == s);
    for (const char* s : {"", "sphere", "euclidean-", "euclidean-2.5", "cone--1", "cone-x"})
        CHECK_THROWS_AS(ProfileChoice::parse(s), ConfigError);
}

TEST_CASE("csv and svg output")
{
    fs::path dir = scratch("output");
    CHECK(format_double(0.1) == "1.0000000000000001e-01");
    CHECK(std::stod(format_double(M_PI)) == M_PI);
    {
        CsvWriter w((dir / "a.csv").string(), {"name", "x", "n"});
        w.row({std::string("plain"), 1.5, 3L});
        w.row({std::string("has,comma \"q\""), -2.0, 0L});
        CHECK_THROWS_AS(w.row({1.0}), std::invalid_argument);
        w.close();
    }
    std::string text = slurp(dir / "a.csv");
    CHECK(text.find("\"has,comma \"\"q\"\"\"") != std::string::npos);
    CHECK(text.find("1.5000000000000000e+00") != std::string::npos);
    CHECK_THROWS_AS(CsvWriter("/nonexistent/dir/a.csv", {"x"}), IoError);

    SvgPlot p;
    p.title = "t";
    p.series.push_back({"s", {0, 1, 2}, {1, 2, 1}});
    p.references.push_back({1.5, "ref"});
    std::string svg = p.render();
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg == p.render());
    p.write((dir / "p.svg").string());
    CHECK(slurp(dir / "p.svg") == svg);
    ensure_directory((dir / "x/y").string());
    CHECK(fs::is_directory(dir / "x/y"));
}

TEST_CASE("command line")
{
    SUBCASE("solve on R^3")
    {
        fs::path dir = scratch("solve");
        Run r = run_cli("solve --set profile=euclidean-3 --set grid_points=2048 --out " + dir.string(), dir);
        CHECK(r.code == 0);
        std::ifstream in(dir / "diagonal.csv");
        std::string line;
        std::getline(in, line);
        std::vector<std::string> header = split(line);
        REQUIRE(header.size() == 6);
        int rows = 0;
        while (std::getline(in, line)) {
            std::vector<std::string> cells = split(line);
            REQUIRE(cells.size() == 6);
            CHECK(std::stod(cells[3]) == doctest::Approx(0.0940).epsilon(0.01));
            ++rows;
        }
        CHECK(rows == 4);
        for (const char* f : {"bounds.csv", "tail_mass.csv", "field.csv"}) CHECK(fs::exists(dir / f));
    }
    SUBCASE("infeasible schedule")
    {
        fs::path dir = scratch("params");
        Run r = run_cli("params --set eta2=0.9 --out " + dir.string(), dir);
        CHECK(r.code == 1);
        CHECK(r.err.find("A1") != std::string::npos);
    }
    SUBCASE("missing config")
    {
        fs::path dir = scratch("missing");
        CHECK(run_cli("solve --config /nonexistent/x.cfg --out " + dir.string(), dir).code == 3);
    }
    SUBCASE("bad override")
    {
        fs::path dir = scratch("override");
        CHECK(run_cli("solve --set bogus=1 --out " + dir.string(), dir).code == 3);
        CHECK(run_cli("solve --set eta1 --out " + dir.string(), dir).code == 3);
    }
    SUBCASE("unknown subcommand")
    {
        fs::path dir = scratch("unknown");
        CHECK(run_cli("frobnicate", dir).code == 3);
    }
    SUBCASE("config file")
    {
        fs::path dir = scratch("file");
        std::ofstream(dir / "run.cfg") << "profile = cone-5\ngrid_points = 1024\ntimes = 1\n";
        Run r = run_cli("solve --config " + (dir / "run.cfg").string() + " --out " + (dir / "o").string(), dir);
        CHECK(r.code == 0);
        CHECK(fs::exists(dir / "o" / "diagonal.csv"));
    }
}
