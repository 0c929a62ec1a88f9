#pragma once

#include "partop/nodes.hpp"

#include <Eigen/Core>

#include <optional>
#include <span>
#include <vector>

namespace partop {

/// One value per node.
using ScalarField = std::vector<double>;

struct MpsParams
{
    WeightParams weight;
    int dim = 2;
    double n0 = 1.0;                   ///< reference particle number density
    std::optional<double> fixed_lambda; ///< unset: lambda per node
};

struct ForcePairParams
{
    double mass = 1.0;
    double density = 1.0;
    MpsParams mps;
};

enum class PressureVariant { original, khayyer_gotoh };

/// Number density of an interior node of a uniform lattice with the given spacing.
double reference_number_density(int dim, double spacing, const WeightParams& params);

Eigen::VectorXd mps_gradient(std::span<const double> field, const NodeSet& nodes, std::size_t i, const MpsParams& params);

double mps_laplacian(std::span<const double> field, const NodeSet& nodes, std::size_t i, const MpsParams& params);

/// Minimum pressure over node i and its nonzero-weight neighbors.
double min_hat_pressure(std::span<const double> field, const NeighborList& nl);

/// Gradient form with p_j - p_hat_i in place of p_j - p_i.
Eigen::VectorXd mps_pressure_gradient(std::span<const double> field, const NodeSet& nodes, std::size_t i,
                                      const MpsParams& params);

/// Gradient form with the symmetric coefficient (p_i + p_j) - (p_hat_i + p_hat_j).
Eigen::VectorXd kg_pressure_gradient(std::span<const double> field, const NodeSet& nodes, std::size_t i,
                                     const MpsParams& params);

/// -(m/rho) times the chosen pressure gradient.
Eigen::VectorXd pressure_force(std::span<const double> field, const NodeSet& nodes, std::size_t i,
                               const ForcePairParams& fp, PressureVariant variant);

/// Momentum bookkeeping over all particles.
struct ForceBalance
{
    Eigen::VectorXd total;       ///< sum of all particle forces
    double max_term = 0.0;       ///< largest |contribution of j to the force on i|
    double max_pair_residual = 0.0; ///< largest |term(j->i) + term(i->j)| over pairs
    double relative_total() const { return max_term > 0.0 ? total.norm() / max_term : total.norm(); }
};

ForceBalance force_balance(std::span<const double> field, const NodeSet& nodes, const ForcePairParams& fp,
                           PressureVariant variant);

} // namespace partop
