// Command-line front end: BVP solves, ensembles, convergence tables and the
// operator cross-check battery.

#include "partop/bvp.hpp"
#include "partop/checks.hpp"
#include "partop/error.hpp"
#include "partop/io.hpp"
#include "partop/nodes.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Options
{
    std::string config_path;
    std::string out = ".";
    bool plot = false;
    std::string seeds = "1,2,3,4,5,6,7";
    std::size_t m_total = 21;
    std::size_t m = 3;
    double rho = 0.0;
    bool rho_set = false;
    std::string rhos = "0,0.25,0.5";
    std::string weight_mode = "identity";
    double re = 0.0;
    bool normalized = false;
    std::string stencil = "centered";
    std::string dx_list = "0.2,0.1,0.05,0.025";
};

// Flags registered on a subcommand, so file values fill in only what the
// command line left unset.
struct Registered
{
    std::vector<std::pair<std::string, CLI::Option*>> options;

    CLI::Option* find(const std::string& key) const
    {
        for (const auto& [k, opt] : options) {
            if (k == key) {
                return opt;
            }
        }
        return nullptr;
    }
};

std::vector<double> parse_doubles(const std::string& text, const std::string& what)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) {
                throw std::invalid_argument(item);
            }
        } catch (const std::logic_error&) {
            throw partop::InvalidArgument(fmt::format("{}: '{}' is not a number", what, item));
        }
    }
    if (out.empty()) {
        throw partop::InvalidArgument(fmt::format("{}: empty list", what));
    }
    return out;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text)
{
    std::vector<std::uint64_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            if (!item.empty() && item[0] == '-') {
                throw std::invalid_argument(item);
            }
            out.push_back(std::stoull(item, &used));
            if (used != item.size()) {
                throw std::invalid_argument(item);
            }
        } catch (const std::logic_error&) {
            throw partop::InvalidArgument(fmt::format("--seeds: '{}' is not a non-negative integer", item));
        }
    }
    if (out.empty()) {
        throw partop::InvalidArgument("--seeds: empty list");
    }
    return out;
}

std::string list_value(const json& v)
{
    if (v.is_string()) {
        return v.get<std::string>();
    }
    if (v.is_array()) {
        std::string s;
        for (const auto& e : v) {
            if (!s.empty()) {
                s += ',';
            }
            s += e.is_string() ? e.get<std::string>() : e.dump();
        }
        return s;
    }
    return v.dump();
}

void apply_config_file(Options& o, const Registered& reg)
{
    if (o.config_path.empty()) {
        return;
    }
    std::ifstream in(o.config_path);
    if (!in) {
        throw partop::InvalidArgument(fmt::format("cannot open config file '{}'", o.config_path));
    }
    json cfg;
    try {
        in >> cfg;
    } catch (const json::exception& e) {
        throw partop::InvalidArgument(fmt::format("config file '{}' is not valid JSON: {}", o.config_path, e.what()));
    }
    if (!cfg.is_object()) {
        throw partop::InvalidArgument(fmt::format("config file '{}' must hold a JSON object", o.config_path));
    }
    for (const auto& [key, value] : cfg.items()) {
        CLI::Option* opt = reg.find(key);
        if (opt == nullptr) {
            throw partop::InvalidArgument(fmt::format("config file '{}': unknown key '{}'", o.config_path, key));
        }
        if (opt->count() > 0) {
            continue;
        }
        try {
            if (key == "out") o.out = value.get<std::string>();
            else if (key == "plot") o.plot = value.get<bool>();
            else if (key == "seeds") o.seeds = list_value(value);
            else if (key == "m-total") o.m_total = value.get<std::size_t>();
            else if (key == "m") o.m = value.get<std::size_t>();
            else if (key == "rho") { o.rho = value.get<double>(); o.rho_set = true; }
            else if (key == "rhos") o.rhos = list_value(value);
            else if (key == "weight-mode") o.weight_mode = value.get<std::string>();
            else if (key == "re") o.re = value.get<double>();
            else if (key == "normalized") o.normalized = value.get<bool>();
            else if (key == "stencil") o.stencil = value.get<std::string>();
            else if (key == "dx") o.dx_list = list_value(value);
        } catch (const json::exception& e) {
            throw partop::InvalidArgument(fmt::format("config key '{}': {}", key, e.what()));
        }
    }
}

fs::path output_dir(const Options& o)
{
    const fs::path dir(o.out);
    if (!fs::is_directory(dir)) {
        throw partop::InvalidArgument(fmt::format("output directory '{}' does not exist", o.out));
    }
    return dir;
}

void write_file(const fs::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) {
        throw partop::Error(fmt::format("cannot write '{}'", path.string()));
    }
}

partop::bvp::Config bvp_config(const Options& o, double rho)
{
    partop::bvp::Config cfg;
    cfg.m_total = o.m_total;
    cfg.m = o.m;
    cfg.rho_rnd = rho;
    cfg.seeds = parse_seeds(o.seeds);
    cfg.normalized = o.normalized;
    if (o.stencil == "centered") {
        cfg.selection = partop::bvp::Selection::centered;
    } else if (o.stencil == "nearest") {
        cfg.selection = partop::bvp::Selection::nearest;
    } else {
        throw partop::InvalidArgument(fmt::format("--stencil must be centered or nearest, got '{}'", o.stencil));
    }
    if (o.weight_mode == "identity") {
        cfg.weighting = partop::RowWeighting::identity();
    } else if (o.weight_mode == "mps") {
        if (o.m_total < 2) {
            throw partop::InvalidArgument("--m-total must be at least 2");
        }
        // M-1 nearest neighbors always lie within 3(M-1) spacings when rho < 1
        const double re = o.re > 0.0 ? o.re : 3.0 * static_cast<double>(o.m - 1) * 2.0 / static_cast<double>(o.m_total - 1);
        cfg.weighting = partop::RowWeighting::mps(re);
    } else {
        throw partop::InvalidArgument(fmt::format("--weight-mode must be identity or mps, got '{}'", o.weight_mode));
    }
    cfg.validate();
    return cfg;
}

partop::io::PlotSpec solution_plot(const partop::bvp::Solution& sol, double rho)
{
    partop::io::Series exact{"exact", {}, sol.exact, partop::io::Series::Style::line};
    partop::io::Series numeric{"numeric", {}, sol.values, partop::io::Series::Style::points};
    for (const auto& p : sol.nodes.positions()) {
        exact.x.push_back(p.x());
        numeric.x.push_back(p.x());
    }
    return {fmt::format("phi'' = x, rho = {}", rho), "x", "phi", {exact, numeric}};
}

partop::io::PlotSpec ensemble_plot(const partop::bvp::EnsembleReport& report, std::size_t m)
{
    partop::io::PlotSpec spec;
    spec.title = fmt::format("M = {}, rho = {}", m, report.rho_rnd);
    spec.x_label = "x";
    spec.y_label = "phi";
    partop::io::Series exact{"exact", report.grid, {}, partop::io::Series::Style::line};
    for (double x : report.grid) {
        exact.y.push_back(partop::bvp::exact_solution(x));
    }
    spec.series.push_back(exact);
    for (const auto& member : report.members) {
        partop::io::Series s{fmt::format("seed {}", member.seed), {}, member.solution.values,
                             partop::io::Series::Style::points};
        for (const auto& p : member.solution.nodes.positions()) {
            s.x.push_back(p.x());
        }
        spec.series.push_back(std::move(s));
    }
    spec.series.push_back({"mean", report.grid, report.mean_curve, partop::io::Series::Style::line});
    return spec;
}

int cmd_solve_bvp(const Options& o)
{
    const fs::path dir = output_dir(o);
    const partop::bvp::Config cfg = bvp_config(o, o.rho);
    const partop::NodeSet nodes = partop::generate_perturbed_1d(cfg.m_total, cfg.rho_rnd, cfg.seeds.front());
    const partop::bvp::Solution sol = partop::bvp::solve(nodes, cfg);

    std::ostringstream csv;
    partop::io::write_solution_csv(csv, sol);
    write_file(dir / "solution.csv", csv.str());
    if (o.plot) {
        std::ostringstream svg;
        partop::io::write_svg(svg, solution_plot(sol, cfg.rho_rnd));
        write_file(dir / "solution.svg", svg.str());
    }
    std::cout << "max_error=" << partop::io::format_double(sol.max_error)
              << " l2_error=" << partop::io::format_double(sol.l2_error) << '\n';
    return 0;
}

int cmd_ensemble(const Options& o)
{
    const bool rho_given = o.rho_set;
    const fs::path dir = output_dir(o);
    const std::vector<double> rhos = rho_given ? std::vector<double>{o.rho} : parse_doubles(o.rhos, "--rhos");
    if (rhos.size() > 26) {
        throw partop::InvalidArgument("at most 26 rho panels are supported");
    }
    std::vector<partop::bvp::EnsembleReport> reports;
    for (double rho : rhos) {
        reports.push_back(partop::bvp::run_ensemble(bvp_config(o, rho)));
    }

    std::ostringstream csv;
    partop::io::write_ensemble_csv(csv, reports);
    write_file(dir / "ensemble.csv", csv.str());
    for (std::size_t k = 0; k < reports.size(); ++k) {
        std::ostringstream svg;
        partop::io::write_svg(svg, ensemble_plot(reports[k], o.m));
        write_file(dir / fmt::format("fig2{}.svg", static_cast<char>('a' + k)), svg.str());
        std::cout << "rho=" << partop::io::format_double(reports[k].rho_rnd) << " members=" << reports[k].members.size()
                  << " mean_max_error=" << partop::io::format_double(reports[k].mean_max_error)
                  << " max_max_error=" << partop::io::format_double(reports[k].max_max_error) << '\n';
    }
    return 0;
}

int cmd_convergence(const Options& o)
{
    const bool rho_given = o.rho_set;
    const fs::path dir = output_dir(o);
    const double rho = rho_given ? o.rho : 0.25;
    const std::vector<double> dx = parse_doubles(o.dx_list, "--dx");
    const auto rows = partop::bvp::convergence_study(bvp_config(o, rho), dx);

    std::ostringstream csv;
    partop::io::write_convergence_csv(csv, rho, rows);
    write_file(dir / "convergence.csv", csv.str());
    std::cout << csv.str();
    return 0;
}

int cmd_op_check(const Options& o)
{
    const fs::path dir = output_dir(o);
    const auto results = partop::checks::run_battery(parse_seeds(o.seeds).front());
    std::ostringstream csv;
    csv << "check,configuration,residual,bound,pass\n";
    bool all = true;
    for (const auto& r : results) {
        csv << r.name << ',' << r.configuration << ',' << partop::io::format_double(r.residual) << ','
            << partop::io::format_double(r.bound) << ',' << (r.pass ? "true" : "false") << '\n';
        all = all && r.pass;
    }
    write_file(dir / "opcheck.csv", csv.str());
    std::cout << csv.str();
    return all ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Discrete differential operators on irregular nodes"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* sub, bool bvp_flags) {
        Registered reg;
        reg.options.emplace_back("config", sub->add_option("--config", o.config_path, "JSON file with flat keys mirroring the flags"));
        reg.options.emplace_back("out", sub->add_option("--out", o.out, "existing output directory"));
        reg.options.emplace_back("plot", sub->add_flag("--plot", o.plot, "also write SVG plots"));
        reg.options.emplace_back("seeds", sub->add_option("--seeds", o.seeds, "comma-separated seeds"));
        if (bvp_flags) {
            reg.options.emplace_back("m-total", sub->add_option("--m-total", o.m_total, "number of nodes on [-1, 1]"));
            reg.options.emplace_back("m", sub->add_option("--m", o.m, "stencil size including the center node"));
            reg.options.emplace_back("rho", sub->add_option("--rho", o.rho, "perturbation amplitude ratio in [0, 1)"));
            reg.options.emplace_back("weight-mode", sub->add_option("--weight-mode", o.weight_mode, "identity or mps"));
            reg.options.emplace_back("re", sub->add_option("--re", o.re, "cutoff radius for mps weights"));
            reg.options.emplace_back("stencil", sub->add_option("--stencil", o.stencil, "centered or nearest stencil neighbors"));
            reg.options.emplace_back("normalized", sub->add_flag("--normalized", o.normalized, "divide stencil rows by neighbor distance"));
        }
        return reg;
    };

    CLI::App* solve = app.add_subcommand("solve-bvp", "solve phi'' = x on one node set");
    Registered solve_reg = add_common(solve, true);

    CLI::App* ensemble = app.add_subcommand("ensemble", "solve over one perturbed node set per seed");
    Registered ensemble_reg = add_common(ensemble, true);
    ensemble_reg.options.emplace_back("rhos", ensemble->add_option("--rhos", o.rhos, "comma-separated rho panels"));

    CLI::App* convergence = app.add_subcommand("convergence", "ensemble-mean error under spacing halving");
    Registered convergence_reg = add_common(convergence, true);
    convergence_reg.options.emplace_back("dx", convergence->add_option("--dx", o.dx_list, "comma-separated spacings"));

    CLI::App* opcheck = app.add_subcommand("op-check", "run the operator cross-check battery");
    Registered opcheck_reg = add_common(opcheck, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (solve->parsed()) {
            apply_config_file(o, solve_reg);
            return cmd_solve_bvp(o);
        }
        if (ensemble->parsed()) {
            o.rho_set = ensemble_reg.find("rho")->count() > 0;
            apply_config_file(o, ensemble_reg);
            return cmd_ensemble(o);
        }
        if (convergence->parsed()) {
            o.rho_set = convergence_reg.find("rho")->count() > 0;
            apply_config_file(o, convergence_reg);
            return cmd_convergence(o);
        }
        apply_config_file(o, opcheck_reg);
        return cmd_op_check(o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
