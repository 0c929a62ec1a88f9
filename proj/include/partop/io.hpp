#pragma once

#include "partop/bvp.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace partop::io {

/// Shortest-safe decimal form: 17 significant digits, round-trips exactly.
std::string format_double(double v);

/// Header `x,phi_numeric,phi_exact,abs_error`.
void write_solution_csv(std::ostream& out, const bvp::Solution& solution);

/// Header `rho,member,x,phi_numeric,phi_exact,abs_error`. Member rows carry the
/// seed; mean-curve rows carry `mean` and are sampled on the regular grid.
void write_ensemble_csv(std::ostream& out, const std::vector<bvp::EnsembleReport>& reports);

/// Header `dx,rho,mean_max_error,observed_order`; observed_order is `exact`
/// below the noise floor and empty where no ratio exists.
void write_convergence_csv(std::ostream& out, double rho, const std::vector<bvp::ConvergenceRow>& rows);

struct Series
{
    enum class Style { line, points };
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    Style style = Style::line;
};

struct PlotSpec
{
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
};

/// 800x600 SVG with linear axes, five ticks per axis and a legend.
void write_svg(std::ostream& out, const PlotSpec& spec);

} // namespace partop::io
