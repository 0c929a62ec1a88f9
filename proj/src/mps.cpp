#include "partop/mps.hpp"

#include "partop/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace partop {

namespace {

void check(std::span<const double> field, const NodeSet& nodes, std::size_t i, const MpsParams& params)
{
    if (field.size() != nodes.size()) {
        throw InvalidArgument(fmt::format("field has {} values for {} nodes", field.size(), nodes.size()));
    }
    if (i >= nodes.size()) {
        throw InvalidArgument(fmt::format("node index {} out of range (size {})", i, nodes.size()));
    }
    if (params.dim != nodes.dim()) {
        throw InvalidArgument(fmt::format("MPS dimension {} does not match node set dimension {}", params.dim, nodes.dim()));
    }
    if (!(params.n0 > 0.0)) {
        throw InvalidArgument(fmt::format("reference number density must be positive, got {}", params.n0));
    }
}

NeighborList support(const NodeSet& nodes, std::size_t i, const MpsParams& params)
{
    NeighborList nl = find_neighbors(nodes, i, params.weight);
    if (nl.empty()) {
        throw IsolatedNode(i);
    }
    return nl;
}

// d/n0 * sum_j coef_j / |r_ij|^2 * r_ij * w_ij
template <typename Coef>
Eigen::VectorXd gradient_sum(const NeighborList& nl, int dim, double n0, Coef&& coef)
{
    Eigen::Vector2d acc = Eigen::Vector2d::Zero();
    for (const Neighbor& nb : nl.neighbors) {
        acc += (coef(nb) / nb.offset.squaredNorm() * nb.weight) * nb.offset;
    }
    return (static_cast<double>(dim) / n0 * acc).head(dim);
}

} // namespace

double reference_number_density(int dim, double spacing, const WeightParams& params)
{
    if (dim != 1 && dim != 2) {
        throw InvalidArgument(fmt::format("dimension must be 1 or 2, got {}", dim));
    }
    if (!(spacing > 0.0)) {
        throw InvalidArgument(fmt::format("lattice spacing must be positive, got {}", spacing));
    }
    const long reach = static_cast<long>(std::ceil(params.r_e / spacing));
    const long ry = dim == 2 ? reach : 0;
    double n = 0.0;
    for (long iy = -ry; iy <= ry; ++iy) {
        for (long ix = -reach; ix <= reach; ++ix) {
            if (ix == 0 && iy == 0) {
                continue;
            }
            const double r = spacing * std::hypot(static_cast<double>(ix), static_cast<double>(iy));
            n += weight(r, params);
        }
    }
    return n;
}

Eigen::VectorXd mps_gradient(std::span<const double> field, const NodeSet& nodes, std::size_t i, const MpsParams& params)
{
    check(field, nodes, i, params);
    const NeighborList nl = support(nodes, i, params);
    const double phi_i = field[i];
    return gradient_sum(nl, params.dim, params.n0, [&](const Neighbor& nb) { return field[nb.index] - phi_i; });
}

double mps_laplacian(std::span<const double> field, const NodeSet& nodes, std::size_t i, const MpsParams& params)
{
    check(field, nodes, i, params);
    const NeighborList nl = support(nodes, i, params);
    const double lambda = params.fixed_lambda ? *params.fixed_lambda : lambda_coefficient(nl);
    if (!(lambda > 0.0)) {
        throw InvalidArgument(fmt::format("lambda must be positive, got {}", lambda));
    }
    double acc = 0.0;
    for (const Neighbor& nb : nl.neighbors) {
        acc += (field[nb.index] - field[i]) * nb.weight;
    }
    return 2.0 * params.dim / (lambda * params.n0) * acc;
}

double min_hat_pressure(std::span<const double> field, const NeighborList& nl)
{
    double p = field[nl.center];
    for (const Neighbor& nb : nl.neighbors) {
        if (nb.weight != 0.0) {
            p = std::min(p, field[nb.index]);
        }
    }
    return p;
}

Eigen::VectorXd mps_pressure_gradient(std::span<const double> field, const NodeSet& nodes, std::size_t i,
                                      const MpsParams& params)
{
    check(field, nodes, i, params);
    const NeighborList nl = support(nodes, i, params);
    const double p_hat = min_hat_pressure(field, nl);
    return gradient_sum(nl, params.dim, params.n0, [&](const Neighbor& nb) { return field[nb.index] - p_hat; });
}

Eigen::VectorXd kg_pressure_gradient(std::span<const double> field, const NodeSet& nodes, std::size_t i,
                                     const MpsParams& params)
{
    check(field, nodes, i, params);
    const NeighborList nl = support(nodes, i, params);
    const double p_hat_i = min_hat_pressure(field, nl);
    return gradient_sum(nl, params.dim, params.n0, [&](const Neighbor& nb) {
        const double p_hat_j = min_hat_pressure(field, find_neighbors(nodes, nb.index, params.weight));
        return (field[i] + field[nb.index]) - (p_hat_i + p_hat_j);
    });
}

Eigen::VectorXd pressure_force(std::span<const double> field, const NodeSet& nodes, std::size_t i,
                               const ForcePairParams& fp, PressureVariant variant)
{
    if (!(fp.mass > 0.0) || !(fp.density > 0.0)) {
        throw InvalidArgument(fmt::format("mass and density must be positive, got {} and {}", fp.mass, fp.density));
    }
    const Eigen::VectorXd grad = variant == PressureVariant::original ? mps_pressure_gradient(field, nodes, i, fp.mps)
                                                                      : kg_pressure_gradient(field, nodes, i, fp.mps);
    return -(fp.mass / fp.density) * grad;
}

ForceBalance force_balance(std::span<const double> field, const NodeSet& nodes, const ForcePairParams& fp,
                           PressureVariant variant)
{
    if (!(fp.mass > 0.0) || !(fp.density > 0.0)) {
        throw InvalidArgument(fmt::format("mass and density must be positive, got {} and {}", fp.mass, fp.density));
    }
    const std::size_t n = nodes.size();
    check(field, nodes, 0, fp.mps);

    const NeighborSearch search(nodes, fp.mps.weight);
    std::vector<NeighborList> lists;
    std::vector<double> p_hat(n);
    lists.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        lists.push_back(search.query(i));
        p_hat[i] = min_hat_pressure(field, lists.back());
    }

    const double prefactor = -(fp.mass / fp.density) * fp.mps.dim / fp.mps.n0;
    // terms[i][k]: contribution of neighbor k of particle i to the force on i
    std::vector<std::vector<Eigen::Vector2d>> terms(n);
    ForceBalance out;
    Eigen::Vector2d total = Eigen::Vector2d::Zero();
    for (std::size_t i = 0; i < n; ++i) {
        Eigen::Vector2d force = Eigen::Vector2d::Zero();
        for (const Neighbor& nb : lists[i].neighbors) {
            const std::size_t j = nb.index;
            const double coef = variant == PressureVariant::original ? field[j] - p_hat[i]
                                                                     : (field[i] + field[j]) - (p_hat[i] + p_hat[j]);
            const Eigen::Vector2d term = (prefactor * (coef / nb.offset.squaredNorm() * nb.weight)) * nb.offset;
            terms[i].push_back(term);
            force += term;
            out.max_term = std::max(out.max_term, term.norm());
        }
        total += force;
    }

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < lists[i].size(); ++k) {
            const std::size_t j = lists[i].neighbors[k].index;
            if (j < i) {
                continue;
            }
            const auto& back = lists[j].neighbors;
            const auto it = std::lower_bound(back.begin(), back.end(), i,
                                             [](const Neighbor& nb, std::size_t idx) { return nb.index < idx; });
            if (it == back.end() || it->index != i) {
                throw Error(fmt::format("neighbor lists of {} and {} are not symmetric", i, j));
            }
            const auto pos = static_cast<std::size_t>(it - back.begin());
            out.max_pair_residual = std::max(out.max_pair_residual, (terms[i][k] + terms[j][pos]).norm());
        }
    }
    out.total = total.head(nodes.dim());
    return out;
}

} // namespace partop
