#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cli_runner.hpp"

#include <cstdlib>
#include <set>
#include <vector>

using namespace clitest;

namespace {

std::vector<std::vector<std::string>> csv_rows(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string c; std::getline(ss, c, ',');) {
            cells.push_back(c);
        }
        if (!line.empty() && line.back() == ',') {
            cells.emplace_back();
        }
        rows.push_back(cells);
    }
    return rows;
}

double value_after(const std::string& text, const std::string& key)
{
    const auto p = text.find(key + "=");
    REQUIRE(p != std::string::npos);
    return std::strtod(text.c_str() + p + key.size() + 1, nullptr);
}

std::string q(const fs::path& p)
{
    return "\"" + p.string() + "\"";
}

} // namespace

TEST_CASE("solve-bvp")
{
    const fs::path dir = scratch_dir("solve");
    SUBCASE("regular nodes")
    {
        const RunResult r = run("solve-bvp --m-total 21 --m 3 --rho 0 --plot --out " + q(dir), dir);
        REQUIRE(r.exit_code == 0);
        CHECK(r.out.starts_with("max_error="));
        CHECK(r.out.find(" l2_error=") != std::string::npos);
        CHECK(value_after(r.out, "max_error") <= 1e-10);
        const auto rows = csv_rows(slurp(dir / "solution.csv"));
        REQUIRE(rows.size() == 22);
        CHECK(rows[0] == std::vector<std::string>{"x", "phi_numeric", "phi_exact", "abs_error"});
        const std::string svg = slurp(dir / "solution.svg");
        CHECK(svg.find("<svg") != std::string::npos);
        CHECK(svg.ends_with("</svg>\n"));
    }
    SUBCASE("no plot unless asked")
    {
        REQUIRE(run("solve-bvp --out " + q(dir), dir).exit_code == 0);
        CHECK(fs::exists(dir / "solution.csv"));
        CHECK_FALSE(fs::exists(dir / "solution.svg"));
    }
    SUBCASE("missing output directory")
    {
        const fs::path missing = dir / "does" / "not" / "exist";
        const RunResult r = run("solve-bvp --out " + q(missing), dir);
        CHECK(r.exit_code != 0);
        CHECK(r.err.find(missing.string()) != std::string::npos);
    }
    SUBCASE("invalid rho")
    {
        const RunResult r = run("solve-bvp --rho 1.5 --out " + q(dir), dir);
        CHECK(r.exit_code != 0);
        CHECK(r.err.find("rho") != std::string::npos);
        CHECK_FALSE(fs::exists(dir / "solution.csv"));
    }
    SUBCASE("invalid choices")
    {
        CHECK(run("solve-bvp --weight-mode cubic --out " + q(dir), dir).exit_code != 0);
        CHECK(run("solve-bvp --stencil widest --out " + q(dir), dir).exit_code != 0);
        CHECK(run("solve-bvp --seeds 1,x --out " + q(dir), dir).exit_code != 0);
        CHECK(run("solve-bvp --m 2 --out " + q(dir), dir).exit_code != 0);
        CHECK(run("frobnicate", dir).exit_code != 0);
    }
    SUBCASE("mps weighting")
    {
        const RunResult r = run("solve-bvp --rho 0.25 --m 5 --weight-mode mps --out " + q(dir), dir);
        REQUIRE(r.exit_code == 0);
        CHECK(value_after(r.out, "max_error") < 0.00642);
    }
    fs::remove_all(dir);
}

TEST_CASE("ensemble")
{
    const fs::path dir = scratch_dir("ensemble");
    SUBCASE("defaults give three panels")
    {
        const RunResult r = run("ensemble --out " + q(dir), dir);
        REQUIRE(r.exit_code == 0);
        for (const char* name : {"fig2a.svg", "fig2b.svg", "fig2c.svg", "ensemble.csv"}) {
            CHECK(fs::exists(dir / name));
        }
        CHECK_FALSE(fs::exists(dir / "fig2d.svg"));

        const auto rows = csv_rows(slurp(dir / "ensemble.csv"));
        REQUIRE(rows.size() == 1 + 3 * (7 * 21 + 21));
        std::set<std::string> members;
        for (std::size_t i = 1; i < rows.size(); ++i) {
            REQUIRE(rows[i].size() == 6);
            if (rows[i][0] == "0") {
                // regular panel: member points coincide with the exact curve
                CHECK(std::strtod(rows[i][5].c_str(), nullptr) <= 1e-10);
            }
            members.insert(rows[i][1]);
        }
        CHECK(members == std::set<std::string>{"1", "2", "3", "4", "5", "6", "7", "mean"});
        CHECK(r.out.find("rho=0.5 members=7") != std::string::npos);
    }
    SUBCASE("seed subset")
    {
        const RunResult r = run("ensemble --seeds 1,2,3 --out " + q(dir), dir);
        REQUIRE(r.exit_code == 0);
        const auto rows = csv_rows(slurp(dir / "ensemble.csv"));
        CHECK(rows.size() == 1 + 3 * (3 * 21 + 21));
        CHECK(r.out.find("members=3") != std::string::npos);
        CHECK(r.out.find("members=7") == std::string::npos);
        const std::string svg = slurp(dir / "fig2b.svg");
        CHECK(svg.find("seed 3") != std::string::npos);
        CHECK(svg.find("seed 4") == std::string::npos);
    }
    SUBCASE("single rho")
    {
        const RunResult r = run("ensemble --rho 0.25 --out " + q(dir), dir);
        REQUIRE(r.exit_code == 0);
        CHECK(fs::exists(dir / "fig2a.svg"));
        CHECK_FALSE(fs::exists(dir / "fig2b.svg"));
    }
    fs::remove_all(dir);
}

TEST_CASE("convergence")
{
    const fs::path dir = scratch_dir("convergence");
    SUBCASE("default study")
    {
        const RunResult r = run("convergence --rho 0.25 --dx 0.2,0.1,0.05,0.025 --out " + q(dir), dir);
        REQUIRE(r.exit_code == 0);
        const std::string csv = slurp(dir / "convergence.csv");
        CHECK(r.out == csv);
        const auto rows = csv_rows(csv);
        REQUIRE(rows.size() == 5);
        CHECK(rows[0] == std::vector<std::string>{"dx", "rho", "mean_max_error", "observed_order"});
        CHECK(rows[1][3].empty());
        CHECK(std::strtod(rows[4][3].c_str(), nullptr) >= 1.0);
    }
    SUBCASE("too few spacings")
    {
        const RunResult r = run("convergence --dx 0.1 --out " + q(dir), dir);
        CHECK(r.exit_code != 0);
        CHECK(r.err.find("need >= 3 spacings") != std::string::npos);
    }
    SUBCASE("regular nodes report the exact sentinel")
    {
        REQUIRE(run("convergence --rho 0 --out " + q(dir), dir).exit_code == 0);
        const auto rows = csv_rows(slurp(dir / "convergence.csv"));
        for (std::size_t i = 1; i < rows.size(); ++i) {
            CHECK(rows[i][3] == "exact");
        }
    }
    fs::remove_all(dir);
}

TEST_CASE("op-check")
{
    const fs::path dir = scratch_dir("opcheck");
    const RunResult r = run("op-check --out " + q(dir), dir);
    CHECK(r.exit_code == 0);
    const auto rows = csv_rows(slurp(dir / "opcheck.csv"));
    REQUIRE(rows.size() > 5);
    CHECK(rows[0] == std::vector<std::string>{"check", "configuration", "residual", "bound", "pass"});
    bool kg = false, original = false;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        REQUIRE(rows[i].size() == 5);
        CHECK(rows[i][4] == "true");
        if (rows[i][0] == "kg_force_sum") {
            kg = true;
            CHECK(std::strtod(rows[i][2].c_str(), nullptr) <= 1e-13);
        }
        if (rows[i][0] == "mps_original_force_sum") {
            original = true;
            CHECK(std::strtod(rows[i][2].c_str(), nullptr) > std::strtod(rows[i][3].c_str(), nullptr));
        }
    }
    CHECK(kg);
    CHECK(original);
    fs::remove_all(dir);
}

TEST_CASE("config files")
{
    const fs::path dir = scratch_dir("config");
    const fs::path cfg = dir / "run.json";
    SUBCASE("file values apply and flags override them")
    {
        std::ofstream(cfg) << R"({"out": ")" << dir.string() << R"(", "seeds": [2, 5], "rhos": [0.5], "m-total": 11})";
        RunResult r = run("ensemble --config " + q(cfg), dir);
        REQUIRE(r.exit_code == 0);
        CHECK(r.out.find("rho=0.5 members=2") != std::string::npos);
        auto rows = csv_rows(slurp(dir / "ensemble.csv"));
        CHECK(rows.size() == 1 + 2 * 11 + 11);

        r = run("ensemble --config " + q(cfg) + " --seeds 1,2,3 --m-total 21", dir);
        REQUIRE(r.exit_code == 0);
        CHECK(r.out.find("members=3") != std::string::npos);
        rows = csv_rows(slurp(dir / "ensemble.csv"));
        CHECK(rows.size() == 1 + 3 * 21 + 21);
    }
    SUBCASE("rho in the file")
    {
        std::ofstream(cfg) << R"({"rho": 0, "plot": true})";
        const RunResult r = run("solve-bvp --config " + q(cfg) + " --out " + q(dir), dir);
        REQUIRE(r.exit_code == 0);
        CHECK(fs::exists(dir / "solution.svg"));
    }
    SUBCASE("unknown key")
    {
        std::ofstream(cfg) << R"({"colour": "blue"})";
        const RunResult r = run("solve-bvp --config " + q(cfg) + " --out " + q(dir), dir);
        CHECK(r.exit_code != 0);
        CHECK(r.err.find("colour") != std::string::npos);
    }
    SUBCASE("malformed file")
    {
        std::ofstream(cfg) << "{not json";
        CHECK(run("solve-bvp --config " + q(cfg) + " --out " + q(dir), dir).exit_code != 0);
        CHECK(run("solve-bvp --config " + q(dir / "absent.json") + " --out " + q(dir), dir).exit_code != 0);
    }
    fs::remove_all(dir);
}

TEST_CASE("reruns are byte-identical")
{
    const fs::path a = scratch_dir("rerun_a");
    const fs::path b = scratch_dir("rerun_b");
    const std::vector<std::pair<std::string, std::vector<std::string>>> commands{
        {"solve-bvp --rho 0.5 --seeds 3 --plot", {"solution.csv", "solution.svg"}},
        {"ensemble", {"ensemble.csv", "fig2a.svg", "fig2b.svg", "fig2c.svg"}},
        {"convergence --rho 0.5", {"convergence.csv"}},
        {"op-check", {"opcheck.csv"}},
    };
    for (const auto& [args, files] : commands) {
        CAPTURE(args);
        REQUIRE(run(args + " --out " + q(a), a).exit_code == 0);
        REQUIRE(run(args + " --out " + q(b), b).exit_code == 0);
        for (const auto& f : files) {
            CAPTURE(f);
            const std::string x = slurp(a / f);
            CHECK_FALSE(x.empty());
            CHECK(x == slurp(b / f));
        }
    }
    fs::remove_all(a);
    fs::remove_all(b);
}
