#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "partop/error.hpp"
#include "partop/io.hpp"

#include <cstdlib>
#include <random>
#include <regex>
#include <sstream>

using namespace partop;

namespace {

std::vector<std::string> lines_of(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        out.push_back(line);
    }
    return out;
}

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) {
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        cells.emplace_back();
    }
    return cells;
}

// Minimal XML balance check: every opened element is closed in order, and
// attribute values contain no raw '<' or '&' outside an entity.
bool well_formed(const std::string& xml)
{
    std::vector<std::string> stack;
    std::size_t pos = 0;
    bool root_seen = false;
    while ((pos = xml.find('<', pos)) != std::string::npos) {
        const std::size_t end = xml.find('>', pos);
        if (end == std::string::npos) {
            return false;
        }
        const std::string tag = xml.substr(pos + 1, end - pos - 1);
        if (tag.find('<') != std::string::npos) {
            return false;
        }
        if (tag.starts_with('?')) {
            if (!tag.ends_with('?')) {
                return false;
            }
        } else if (tag.starts_with('/')) {
            if (stack.empty() || stack.back() != tag.substr(1)) {
                return false;
            }
            stack.pop_back();
        } else {
            const std::string name = tag.substr(0, tag.find_first_of(" \n/"));
            if (stack.empty()) {
                if (root_seen) {
                    return false;
                }
                root_seen = true;
            }
            if (!tag.ends_with('/')) {
                stack.push_back(name);
            }
        }
        pos = end + 1;
    }
    static const std::regex bare_amp("&(?!(amp|lt|gt|quot|apos);)");
    return stack.empty() && root_seen && !std::regex_search(xml, bare_amp);
}

} // namespace

TEST_CASE("format_double round-trips")
{
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    for (int t = 0; t < 1000; ++t) {
        const double v = u(rng) * std::pow(10.0, static_cast<double>(t % 40 - 20));
        CHECK(std::strtod(io::format_double(v).c_str(), nullptr) == v);
    }
    CHECK(io::format_double(0.0) == "0");
    CHECK(io::format_double(-1.0) == "-1");
    CHECK(io::format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("solution CSV")
{
    const bvp::Solution s = bvp::solve(generate_regular_1d(5), bvp::Config{.m_total = 5});
    std::ostringstream out;
    io::write_solution_csv(out, s);
    const auto lines = lines_of(out.str());
    REQUIRE(lines.size() == 6);
    CHECK(lines[0] == "x,phi_numeric,phi_exact,abs_error");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto cells = split(lines[i]);
        REQUIRE(cells.size() == 4);
        CHECK(std::strtod(cells[0].c_str(), nullptr) == s.nodes[i - 1].x());
        CHECK(std::strtod(cells[1].c_str(), nullptr) == s.values[i - 1]);
        CHECK(std::strtod(cells[2].c_str(), nullptr) == s.exact[i - 1]);
    }
    CHECK(lines[1] == "-1,0,0,0");
}

TEST_CASE("ensemble CSV")
{
    bvp::Config cfg;
    cfg.m_total = 11;
    cfg.seeds = {4, 9};
    cfg.rho_rnd = 0.25;
    const bvp::EnsembleReport r = bvp::run_ensemble(cfg);
    std::ostringstream out;
    io::write_ensemble_csv(out, {r});
    const auto lines = lines_of(out.str());
    CHECK(lines[0] == "rho,member,x,phi_numeric,phi_exact,abs_error");
    REQUIRE(lines.size() == 1 + 2 * 11 + 11);
    CHECK(lines[1].starts_with("0.25,4,-1,"));
    CHECK(lines[12].starts_with("0.25,9,-1,"));
    CHECK(lines[23].starts_with("0.25,mean,-1,"));
    for (std::size_t i = 1; i < lines.size(); ++i) {
        CHECK(split(lines[i]).size() == 6);
    }
}

TEST_CASE("convergence CSV sentinels")
{
    const std::vector<bvp::ConvergenceRow> rows{
        {0.2, 1e-3, std::nullopt, false}, {0.1, 2.5e-4, 2.0, false}, {0.05, 1e-17, std::nullopt, true}};
    std::ostringstream out;
    io::write_convergence_csv(out, 0.25, rows);
    const auto lines = lines_of(out.str());
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "dx,rho,mean_max_error,observed_order");
    CHECK(lines[1] == "0.20000000000000001,0.25,0.001,");
    CHECK(lines[2] == "0.10000000000000001,0.25,0.00025000000000000001,2");
    CHECK(lines[3].ends_with(",exact"));
}

TEST_CASE("SVG output")
{
    io::PlotSpec spec{"phi <&> \"test\"", "x", "phi", {}};
    spec.series.push_back({"exact", {-1, 0, 1}, {0, 0.5, 0}, io::Series::Style::line});
    spec.series.push_back({"pts & more", {-0.5, 0.5}, {0.1, 0.2}, io::Series::Style::points});
    std::ostringstream out;
    io::write_svg(out, spec);
    const std::string svg = out.str();
    CHECK(well_formed(svg));
    CHECK(svg.find("width=\"800\" height=\"600\"") != std::string::npos);
    CHECK(svg.find("phi &lt;&amp;&gt; &quot;test&quot;") != std::string::npos);
    CHECK(svg.find("pts &amp; more") != std::string::npos);

    std::size_t circles = 0;
    for (std::size_t p = 0; (p = svg.find("<circle", p)) != std::string::npos; ++p) {
        ++circles;
    }
    CHECK(circles == 2 + 1); // two points plus the legend marker
    CHECK(svg.find("<polyline") != std::string::npos);

    // identical input gives identical text
    std::ostringstream again;
    io::write_svg(again, spec);
    CHECK(again.str() == svg);

    // a degenerate (single-point) range still renders
    io::PlotSpec flat{"flat", "x", "y", {{"one", {0.0}, {0.0}, io::Series::Style::points}}};
    std::ostringstream f;
    io::write_svg(f, flat);
    CHECK(well_formed(f.str()));
    CHECK(f.str().find("nan") == std::string::npos);
}

TEST_CASE("SVG errors")
{
    std::ostringstream out;
    CHECK_THROWS_AS(io::write_svg(out, io::PlotSpec{"t", "x", "y", {}}), InvalidArgument);
    io::PlotSpec bad{"t", "x", "y", {{"s", {1, 2}, {1}, io::Series::Style::line}}};
    CHECK_THROWS_AS(io::write_svg(out, bad), InvalidArgument);
}

TEST_CASE("well-formedness checker rejects broken markup")
{
    CHECK_FALSE(well_formed("<svg><g></svg>"));
    CHECK_FALSE(well_formed("<svg>a & b</svg>"));
    CHECK(well_formed("<?xml version=\"1.0\"?><svg><g/><text>a &amp; b</text></svg>"));
}
