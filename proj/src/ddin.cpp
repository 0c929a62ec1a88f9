#include "partop/ddin.hpp"

#include "partop/error.hpp"

#include <fmt/format.h>

#include <cmath>

namespace partop::ddin {

std::string_view to_string(Operator op)
{
    switch (op) {
    case Operator::identity: return "identity";
    case Operator::dx: return "dx";
    case Operator::dy: return "dy";
    case Operator::dxx: return "dxx";
    case Operator::dxy: return "dxy";
    case Operator::dyy: return "dyy";
    case Operator::laplacian: return "laplacian";
    }
    return "?";
}

Operator to_operator(Derivative d)
{
    switch (d) {
    case Derivative::dx: return Operator::dx;
    case Derivative::dy: return Operator::dy;
    case Derivative::dxx: return Operator::dxx;
    case Derivative::dxy: return Operator::dxy;
    case Derivative::dyy: return Operator::dyy;
    }
    throw InvalidArgument("unknown derivative label");
}

namespace {

// Images at zero offset of dx^px * dy^py.
std::map<Operator, double> monomial_images(int px, int py, int dim)
{
    auto at_zero = [&](int dx_order, int dy_order) {
        // d^a/dx^a d^b/dy^b of x^px y^py at 0 is px! py! when (a, b) == (px, py), else 0
        if (dx_order != px || dy_order != py) {
            return 0.0;
        }
        double f = 1.0;
        for (int k = 2; k <= px; ++k) f *= k;
        for (int k = 2; k <= py; ++k) f *= k;
        return f;
    };
    std::map<Operator, double> images{
        {Operator::identity, at_zero(0, 0)},
        {Operator::dx, at_zero(1, 0)},
        {Operator::dxx, at_zero(2, 0)},
    };
    if (dim == 2) {
        images[Operator::dy] = at_zero(0, 1);
        images[Operator::dxy] = at_zero(1, 1);
        images[Operator::dyy] = at_zero(0, 2);
        images[Operator::laplacian] = at_zero(2, 0) + at_zero(0, 2);
    } else {
        images[Operator::laplacian] = at_zero(2, 0);
    }
    return images;
}

BasisFunction monomial(int px, int py, int dim)
{
    BasisFunction f;
    f.dim = dim;
    f.name = dim == 1 ? fmt::format("x^{}", px) : fmt::format("x^{} y^{}", px, py);
    f.eval = [px, py](const Point& d) { return std::pow(d.x(), px) * std::pow(d.y(), py); };
    f.images = monomial_images(px, py, dim);
    f.scale_degree = px + py;
    return f;
}

} // namespace

Basis power_basis(int order, int dim)
{
    if (order != 1 && order != 2) {
        throw InvalidArgument(fmt::format("power basis order must be 1 or 2, got {}", order));
    }
    if (dim != 1 && dim != 2) {
        throw InvalidArgument(fmt::format("power basis dimension must be 1 or 2, got {}", dim));
    }
    Basis basis;
    if (dim == 1) {
        for (int p = 1; p <= order; ++p) {
            basis.push_back(monomial(p, 0, 1));
        }
        return basis;
    }
    for (int total = 1; total <= order; ++total) {
        for (int py = 0; py <= total; ++py) {
            basis.push_back(monomial(total - py, py, 2));
        }
    }
    return basis;
}

Basis gaussian_basis(int dim, double width)
{
    if (dim != 1 && dim != 2) {
        throw InvalidArgument(fmt::format("basis dimension must be 1 or 2, got {}", dim));
    }
    if (!(width > 0.0) || !std::isfinite(width)) {
        throw InvalidArgument(fmt::format("Gaussian width must be positive, got {}", width));
    }
    Basis basis = power_basis(1, dim);
    BasisFunction g;
    g.dim = dim;
    g.name = fmt::format("exp(-r^2/{:.6g}^2)-1", width);
    const double inv_c2 = 1.0 / (width * width);
    g.eval = [inv_c2](const Point& d) { return std::expm1(-d.squaredNorm() * inv_c2); };
    g.images = {
        {Operator::identity, 0.0},
        {Operator::dx, 0.0},
        {Operator::dxx, -2.0 * inv_c2},
        {Operator::laplacian, -2.0 * dim * inv_c2},
    };
    if (dim == 2) {
        g.images[Operator::dy] = 0.0;
        g.images[Operator::dxy] = 0.0;
        g.images[Operator::dyy] = -2.0 * inv_c2;
    }
    basis.push_back(std::move(g));
    return basis;
}

Interpolant fit(const NodeSet& nodes, std::span<const double> field, const NeighborList& nl, const Basis& basis,
                const RowWeighting& weighting)
{
    if (field.size() != nodes.size()) {
        throw InvalidArgument(fmt::format("field has {} values for {} nodes", field.size(), nodes.size()));
    }
    if (basis.empty()) {
        throw InvalidArgument("interpolation basis is empty");
    }
    for (const BasisFunction& f : basis) {
        if (f.dim != nodes.dim()) {
            throw InvalidArgument(fmt::format("basis function {} is {}D but nodes are {}D", f.name, f.dim, nodes.dim()));
        }
    }
    const auto nrows = static_cast<Eigen::Index>(nl.size());
    const auto ncols = static_cast<Eigen::Index>(basis.size());
    if (nrows < ncols) {
        throw UnderdeterminedStencil(fmt::format("underdetermined stencil at node {}: {} neighbors for {} basis functions",
                                                 nl.center, nrows, ncols));
    }

    Eigen::MatrixXd rows(nrows, ncols);
    Eigen::VectorXd rhs(nrows);
    Eigen::VectorXd weights(nrows);
    double mean_distance = 0.0;
    const double phi_i = field[nl.center];
    for (Eigen::Index r = 0; r < nrows; ++r) {
        const Neighbor& nb = nl.neighbors[static_cast<std::size_t>(r)];
        for (Eigen::Index c = 0; c < ncols; ++c) {
            rows(r, c) = basis[static_cast<std::size_t>(c)].eval(nb.offset);
        }
        rhs[r] = field[nb.index] - phi_i;
        weights[r] = weighting.kind == RowWeighting::Kind::mps ? weight(nb.distance, WeightParams{weighting.r_e}) : 1.0;
        if (!(weights[r] > 0.0)) {
            throw InvalidArgument(fmt::format("neighbor {} of node {} lies outside the weight cutoff {}", nb.index,
                                              nl.center, weighting.r_e));
        }
        mean_distance += nb.distance;
    }
    mean_distance /= static_cast<double>(nrows);

    Eigen::VectorXd column_scale(ncols);
    for (Eigen::Index c = 0; c < ncols; ++c) {
        column_scale[c] = std::pow(mean_distance, basis[static_cast<std::size_t>(c)].scale_degree);
    }
    const LeastSquaresOperator op = weighted_least_squares(rows, weights, column_scale);

    Interpolant out;
    out.center = nl.center;
    out.center_position = nodes[nl.center];
    out.phi_center = phi_i;
    out.coefficients = op.pseudo_inverse * rhs;
    out.basis = basis;
    out.condition = op.condition;
    return out;
}

Interpolant fit(const NodeSet& nodes, std::span<const double> field, std::size_t i, const Basis& basis,
                const RowWeighting& weighting)
{
    if (!(weighting.r_e > 0.0)) {
        throw InvalidArgument("radius neighbor selection needs a positive r_e");
    }
    return fit(nodes, field, find_neighbors(nodes, i, WeightParams{weighting.r_e}), basis, weighting);
}

double evaluate(const Interpolant& interp, const Point& x)
{
    const Point offset = x - interp.center_position;
    double value = interp.phi_center;
    for (std::size_t mu = 0; mu < interp.basis.size(); ++mu) {
        value += interp.coefficients[static_cast<Eigen::Index>(mu)] * interp.basis[mu].eval(offset);
    }
    return value;
}

double apply_operator(const Interpolant& interp, Operator op)
{
    double value = op == Operator::identity ? interp.phi_center : 0.0;
    for (std::size_t mu = 0; mu < interp.basis.size(); ++mu) {
        const auto& images = interp.basis[mu].images;
        const auto it = images.find(op);
        if (it == images.end()) {
            throw InvalidArgument(fmt::format("operator {} not supported by basis function {}", to_string(op),
                                              interp.basis[mu].name));
        }
        value += interp.coefficients[static_cast<Eigen::Index>(mu)] * it->second;
    }
    return value;
}

} // namespace partop::ddin
