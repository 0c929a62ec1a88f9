#include "partop/io.hpp"

#include "partop/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace partop::io {

std::string format_double(double v)
{
    return fmt::format("{:.17g}", v);
}

void write_solution_csv(std::ostream& out, const bvp::Solution& solution)
{
    out << "x,phi_numeric,phi_exact,abs_error\n";
    for (std::size_t i = 0; i < solution.values.size(); ++i) {
        const double x = solution.nodes[i].x();
        out << format_double(x) << ',' << format_double(solution.values[i]) << ','
            << format_double(solution.exact[i]) << ',' << format_double(std::abs(solution.values[i] - solution.exact[i]))
            << '\n';
    }
}

void write_ensemble_csv(std::ostream& out, const std::vector<bvp::EnsembleReport>& reports)
{
    out << "rho,member,x,phi_numeric,phi_exact,abs_error\n";
    for (const auto& report : reports) {
        const std::string rho = format_double(report.rho_rnd);
        for (const auto& member : report.members) {
            const auto& sol = member.solution;
            for (std::size_t i = 0; i < sol.values.size(); ++i) {
                out << rho << ',' << member.seed << ',' << format_double(sol.nodes[i].x()) << ','
                    << format_double(sol.values[i]) << ',' << format_double(sol.exact[i]) << ','
                    << format_double(std::abs(sol.values[i] - sol.exact[i])) << '\n';
            }
        }
        for (std::size_t k = 0; k < report.grid.size(); ++k) {
            const double exact = bvp::exact_solution(report.grid[k]);
            out << rho << ",mean," << format_double(report.grid[k]) << ',' << format_double(report.mean_curve[k]) << ','
                << format_double(exact) << ',' << format_double(std::abs(report.mean_curve[k] - exact)) << '\n';
        }
    }
}

void write_convergence_csv(std::ostream& out, double rho, const std::vector<bvp::ConvergenceRow>& rows)
{
    out << "dx,rho,mean_max_error,observed_order\n";
    for (const auto& row : rows) {
        out << format_double(row.dx) << ',' << format_double(rho) << ',' << format_double(row.mean_max_error) << ',';
        if (row.exact) {
            out << "exact";
        } else if (row.observed_order) {
            out << format_double(*row.observed_order);
        }
        out << '\n';
    }
}

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 600.0;
constexpr double kLeft = 90.0;
constexpr double kRight = 180.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 70.0;
constexpr int kTicks = 5;

constexpr const char* kPalette[] = {"#000000", "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#17becf"};

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

struct Range
{
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v)
    {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad()
    {
        if (hi - lo <= 0.0) {
            const double d = lo == 0.0 ? 1.0 : 0.1 * std::abs(lo);
            lo -= d;
            hi += d;
        }
    }
};

} // namespace

void write_svg(std::ostream& out, const PlotSpec& spec)
{
    if (spec.series.empty()) {
        throw InvalidArgument("plot needs at least one series");
    }
    Range xr;
    Range yr;
    for (const auto& s : spec.series) {
        if (s.x.size() != s.y.size()) {
            throw InvalidArgument(fmt::format("series '{}' has {} x values and {} y values", s.label, s.x.size(), s.y.size()));
        }
        for (std::size_t k = 0; k < s.x.size(); ++k) {
            xr.add(s.x[k]);
            yr.add(s.y[k]);
        }
    }
    xr.pad();
    yr.pad();

    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    auto sx = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
    auto sy = [&](double y) { return kTop + (yr.hi - y) / (yr.hi - yr.lo) * ph; };

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << fmt::format("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n",
                       kWidth, kHeight);
    out << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n";
    out << fmt::format("<text x=\"{}\" y=\"30\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"18\">{}</text>\n",
                       kLeft + pw / 2, escape(spec.title));
    out << fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", kLeft, kTop,
                       pw, ph);

    for (int t = 0; t < kTicks; ++t) {
        const double fx = xr.lo + (xr.hi - xr.lo) * t / (kTicks - 1);
        const double fy = yr.lo + (yr.hi - yr.lo) * t / (kTicks - 1);
        out << fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"black\"/>\n", sx(fx),
                           kTop + ph, kTop + ph + 6);
        out << fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\" font-family=\"sans-serif\" "
                           "font-size=\"12\">{:.4g}</text>\n",
                           sx(fx), kTop + ph + 22, fx);
        out << fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" stroke=\"black\"/>\n",
                           kLeft - 6, sy(fy), kLeft);
        out << fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\" font-family=\"sans-serif\" "
                           "font-size=\"12\">{:.4g}</text>\n",
                           kLeft - 10, sy(fy) + 4, fy);
    }
    out << fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">{}</text>\n",
                       kLeft + pw / 2, kHeight - 20, escape(spec.x_label));
    out << fmt::format("<text x=\"20\" y=\"{0}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" "
                       "transform=\"rotate(-90 20 {0})\">{1}</text>\n",
                       kTop + ph / 2, escape(spec.y_label));

    for (std::size_t k = 0; k < spec.series.size(); ++k) {
        const auto& s = spec.series[k];
        const char* color = kPalette[k % std::size(kPalette)];
        out << fmt::format("<g id=\"series-{}\">\n", k);
        if (s.style == Series::Style::line) {
            out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
            for (std::size_t p = 0; p < s.x.size(); ++p) {
                out << fmt::format("{}{:.2f},{:.2f}", p == 0 ? "" : " ", sx(s.x[p]), sy(s.y[p]));
            }
            out << "\"/>\n";
        } else {
            for (std::size_t p = 0; p < s.x.size(); ++p) {
                out << fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"none\" stroke=\"{}\"/>\n",
                                   sx(s.x[p]), sy(s.y[p]), color);
            }
        }
        const double ly = kTop + 10 + 20.0 * static_cast<double>(k);
        const double lx = kLeft + pw + 15;
        if (s.style == Series::Style::line) {
            out << fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"2\"/>\n", lx, ly,
                               lx + 20, ly, color);
        } else {
            out << fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"none\" stroke=\"{}\"/>\n", lx + 10, ly, color);
        }
        out << fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n", lx + 28,
                           ly + 4, escape(s.label));
        out << "</g>\n";
    }
    out << "</svg>\n";
}

} // namespace partop::io
