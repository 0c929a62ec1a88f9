#include "partop/lsq.hpp"

#include "partop/error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace partop {

std::string_view to_string(Derivative d)
{
    switch (d) {
    case Derivative::dx: return "dx";
    case Derivative::dy: return "dy";
    case Derivative::dxx: return "dxx";
    case Derivative::dxy: return "dxy";
    case Derivative::dyy: return "dyy";
    }
    return "?";
}

double DerivativeEstimate::operator[](Derivative d) const
{
    const auto it = std::find(labels.begin(), labels.end(), d);
    if (it == labels.end()) {
        throw InvalidArgument(fmt::format("derivative {} not part of this estimate", to_string(d)));
    }
    return values[it - labels.begin()];
}

bool DerivativeEstimate::has(Derivative d) const
{
    return std::find(labels.begin(), labels.end(), d) != labels.end();
}

double DerivativeEstimate::laplacian() const
{
    return (*this)[Derivative::dxx] + (has(Derivative::dyy) ? (*this)[Derivative::dyy] : 0.0);
}

double StencilCoefficients::apply(std::span<const double> field) const
{
    double acc = center * field[center_index];
    for (std::size_t k = 0; k < neighbors.size(); ++k) {
        acc += neighbors[k] * field[neighbor_indices[k]];
    }
    return acc;
}

LeastSquaresOperator weighted_least_squares(const Eigen::MatrixXd& rows, const Eigen::VectorXd& row_weights,
                                            const Eigen::VectorXd& column_scale)
{
    const Eigen::Index nrows = rows.rows();
    const Eigen::Index ncols = rows.cols();
    if (nrows < ncols) {
        throw UnderdeterminedStencil(
            fmt::format("underdetermined stencil: {} rows for {} unknowns", nrows, ncols));
    }
    if (row_weights.size() != nrows || column_scale.size() != ncols) {
        throw InvalidArgument("least-squares weights or scales do not match the system shape");
    }
    for (Eigen::Index j = 0; j < nrows; ++j) {
        if (!(row_weights[j] > 0.0) || !std::isfinite(row_weights[j])) {
            throw InvalidArgument(fmt::format("row weight {} is not a positive finite number: {}", j, row_weights[j]));
        }
    }

    const Eigen::MatrixXd scaled = rows * column_scale.cwiseInverse().asDiagonal();
    const Eigen::MatrixXd weighted_t = scaled.transpose() * row_weights.asDiagonal();
    const Eigen::MatrixXd normal = weighted_t * scaled;

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(normal, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    const double condition = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    if (!(condition < kDegenerateCondition)) {
        throw DegenerateStencil(fmt::format("degenerate stencil (condition estimate {:.3e})", condition), condition);
    }

    LeastSquaresOperator out;
    out.condition = condition;
    Eigen::MatrixXd g;
    if (condition < kQrFallbackCondition) {
        g = normal.llt().solve(weighted_t);
    } else {
        const Eigen::VectorXd root = row_weights.cwiseSqrt();
        const Eigen::MatrixXd lhs = root.asDiagonal() * scaled;
        const Eigen::MatrixXd w_root = root.asDiagonal();
        g = lhs.colPivHouseholderQr().solve(w_root);
        out.used_qr = true;
    }
    out.pseudo_inverse = column_scale.cwiseInverse().asDiagonal() * g;
    return out;
}

StencilSystem build_taylor_system(const NodeSet& nodes, std::span<const double> field, const NeighborList& nl,
                                  int order, const RowWeighting& weighting, bool normalized)
{
    if (order != 1 && order != 2) {
        throw InvalidArgument(fmt::format("Taylor order must be 1 or 2, got {}", order));
    }
    if (!field.empty() && field.size() != nodes.size()) {
        throw InvalidArgument(fmt::format("field has {} values for {} nodes", field.size(), nodes.size()));
    }
    const int dim = nodes.dim();
    const std::size_t i = nl.center;

    StencilSystem sys;
    sys.center = i;
    if (dim == 1) {
        sys.unknowns = order == 1 ? std::vector{Derivative::dx} : std::vector{Derivative::dx, Derivative::dxx};
    } else if (order == 1) {
        sys.unknowns = {Derivative::dx, Derivative::dy};
    } else {
        sys.unknowns = {Derivative::dx, Derivative::dy, Derivative::dxx, Derivative::dxy, Derivative::dyy};
    }

    const auto nrows = static_cast<Eigen::Index>(nl.size());
    const auto ncols = static_cast<Eigen::Index>(sys.unknowns.size());
    if (nrows < ncols) {
        throw UnderdeterminedStencil(fmt::format("underdetermined stencil at node {}: {} neighbors for {} unknowns",
                                                 i, nrows, ncols));
    }

    sys.rows.resize(nrows, ncols);
    sys.rhs.resize(nrows);
    sys.row_weights.resize(nrows);
    sys.rhs_scale.resize(nrows);
    double mean_distance = 0.0;
    for (Eigen::Index r = 0; r < nrows; ++r) {
        const Neighbor& nb = nl.neighbors[static_cast<std::size_t>(r)];
        if (!(nb.distance > 0.0)) {
            throw InvalidArgument(fmt::format("node {} coincides with center node {}", nb.index, i));
        }
        const double dx = nb.offset.x();
        const double dy = nb.offset.y();
        const double s = normalized ? 1.0 / nb.distance : 1.0;
        if (dim == 1) {
            sys.rows(r, 0) = dx * s;
            if (order == 2) {
                sys.rows(r, 1) = 0.5 * dx * dx * s;
            }
        } else {
            sys.rows(r, 0) = dx * s;
            sys.rows(r, 1) = dy * s;
            if (order == 2) {
                sys.rows(r, 2) = 0.5 * dx * dx * s;
                sys.rows(r, 3) = dx * dy * s;
                sys.rows(r, 4) = 0.5 * dy * dy * s;
            }
        }
        sys.rhs_scale[r] = s;
        sys.rhs[r] = field.empty() ? 0.0 : (field[nb.index] - field[i]) * s;
        if (weighting.kind == RowWeighting::Kind::mps) {
            const double w = weight(nb.distance, WeightParams{weighting.r_e});
            if (!(w > 0.0)) {
                throw InvalidArgument(fmt::format("neighbor {} of node {} lies outside the weight cutoff {}", nb.index,
                                                  i, weighting.r_e));
            }
            sys.row_weights[r] = w;
        } else {
            sys.row_weights[r] = 1.0;
        }
        sys.neighbor_indices.push_back(nb.index);
        mean_distance += nb.distance;
    }
    mean_distance /= static_cast<double>(nrows);

    sys.column_scale.resize(ncols);
    for (Eigen::Index c = 0; c < ncols; ++c) {
        const Derivative d = sys.unknowns[static_cast<std::size_t>(c)];
        const int degree = (d == Derivative::dx || d == Derivative::dy) ? 1 : 2;
        sys.column_scale[c] = std::pow(mean_distance, normalized ? degree - 1 : degree);
    }
    return sys;
}

namespace {

NeighborList radius_support(const NodeSet& nodes, std::size_t i, const RowWeighting& weighting)
{
    if (!(weighting.r_e > 0.0)) {
        throw InvalidArgument("radius neighbor selection needs a positive r_e");
    }
    return find_neighbors(nodes, i, WeightParams{weighting.r_e});
}

} // namespace

StencilSystem build_first_order(const NodeSet& nodes, std::span<const double> field, std::size_t i,
                                const RowWeighting& weighting, bool normalized)
{
    return build_taylor_system(nodes, field, radius_support(nodes, i, weighting), 1, weighting, normalized);
}

StencilSystem build_second_order(const NodeSet& nodes, std::span<const double> field, std::size_t i,
                                 const RowWeighting& weighting, bool normalized)
{
    return build_taylor_system(nodes, field, radius_support(nodes, i, weighting), 2, weighting, normalized);
}

DerivativeEstimate solve_wlsq(const StencilSystem& system)
{
    const LeastSquaresOperator op = weighted_least_squares(system.rows, system.row_weights, system.column_scale);
    DerivativeEstimate est;
    est.labels = system.unknowns;
    est.values = op.pseudo_inverse * system.rhs;
    est.condition = op.condition;
    return est;
}

Eigen::VectorXd gradient(const NodeSet& nodes, std::span<const double> field, std::size_t i,
                         const RowWeighting& weighting, bool normalized)
{
    return solve_wlsq(build_first_order(nodes, field, i, weighting, normalized)).values;
}

DerivativeEstimate derivatives2(const NodeSet& nodes, std::span<const double> field, std::size_t i,
                                const RowWeighting& weighting)
{
    return solve_wlsq(build_second_order(nodes, field, i, weighting));
}

StencilCoefficients stencil_coefficients(const NodeSet& nodes, const NeighborList& nl, const RowWeighting& weighting,
                                         Derivative target, int order, bool normalized)
{
    const StencilSystem sys = build_taylor_system(nodes, {}, nl, order, weighting, normalized);
    const auto it = std::find(sys.unknowns.begin(), sys.unknowns.end(), target);
    if (it == sys.unknowns.end()) {
        throw InvalidArgument(fmt::format("derivative {} is not available from an order-{} stencil in {}D",
                                          to_string(target), order, nodes.dim()));
    }
    const Eigen::Index row = it - sys.unknowns.begin();
    const LeastSquaresOperator op = weighted_least_squares(sys.rows, sys.row_weights, sys.column_scale);

    StencilCoefficients out;
    out.target = target;
    out.center_index = nl.center;
    out.neighbor_indices = sys.neighbor_indices;
    out.neighbors.resize(sys.neighbor_indices.size());
    double sum = 0.0;
    for (std::size_t k = 0; k < out.neighbors.size(); ++k) {
        const auto col = static_cast<Eigen::Index>(k);
        out.neighbors[k] = op.pseudo_inverse(row, col) * sys.rhs_scale[col];
        sum += out.neighbors[k];
    }
    out.center = -sum;
    return out;
}

StencilCoefficients stencil_coefficients(const NodeSet& nodes, std::size_t i, const RowWeighting& weighting,
                                         Derivative target, int order, bool normalized)
{
    return stencil_coefficients(nodes, radius_support(nodes, i, weighting), weighting, target, order, normalized);
}

} // namespace partop
