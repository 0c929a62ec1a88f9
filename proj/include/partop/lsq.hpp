#pragma once

#include "partop/nodes.hpp"

#include <Eigen/Core>

#include <span>
#include <string_view>
#include <vector>

namespace partop {

/// Unknown derivatives of a Taylor stencil.
enum class Derivative { dx, dy, dxx, dxy, dyy };

std::string_view to_string(Derivative d);

/// How stencil rows are weighted in the least-squares fit.
struct RowWeighting
{
    enum class Kind { identity, mps };
    Kind kind = Kind::mps;
    double r_e = 0.0;

    static RowWeighting identity() { return {Kind::identity, 0.0}; }
    static RowWeighting mps(double r_e) { return {Kind::mps, r_e}; }
};

/// Above this condition estimate the normal equations are replaced by a QR solve.
inline constexpr double kQrFallbackCondition = 1e8;
/// At or above this condition estimate a stencil is rejected as degenerate.
inline constexpr double kDegenerateCondition = 1e12;

/// Local rectangular system A x = b with diagonal row weights W.
///
/// rhs_scale[j] is the factor that maps phi_j - phi_i onto rhs[j] (1 for plain
/// rows, 1/|r_j - r_i| for normalized rows). column_scale holds the length
/// scale each column is divided by before forming the normal equations.
struct StencilSystem
{
    Eigen::MatrixXd rows;
    Eigen::VectorXd rhs;
    Eigen::VectorXd row_weights;
    std::vector<Derivative> unknowns;
    std::vector<std::size_t> neighbor_indices;
    std::size_t center = 0;
    Eigen::VectorXd rhs_scale;
    Eigen::VectorXd column_scale;
};

struct DerivativeEstimate
{
    std::vector<Derivative> labels;
    Eigen::VectorXd values;
    double condition = 0.0;

    /// Throws if the label was not among the unknowns.
    double operator[](Derivative d) const;
    bool has(Derivative d) const;
    /// dxx (+ dyy in 2D).
    double laplacian() const;
};

/// Linear functional (L phi)_i ~ center * phi_i + sum_j neighbors[j] * phi_j.
struct StencilCoefficients
{
    Derivative target;
    std::size_t center_index = 0;
    double center = 0.0;
    std::vector<std::size_t> neighbor_indices;
    std::vector<double> neighbors;

    double apply(std::span<const double> field) const;
};

/// Weighted least-squares operator G = (A^T W A)^{-1} A^T W in original
/// (unscaled) unknowns, so that the solution is G b.
struct LeastSquaresOperator
{
    Eigen::MatrixXd pseudo_inverse;
    double condition = 0.0;
    bool used_qr = false;
};

/// Solves the weighted problem for a design matrix whose column k carries
/// column_scale[k] as its natural length scale.
LeastSquaresOperator weighted_least_squares(const Eigen::MatrixXd& rows, const Eigen::VectorXd& row_weights,
                                            const Eigen::VectorXd& column_scale);

/// First-order Taylor system over the radius neighbors of i. With normalized
/// rows and rhs are divided by the neighbor distance.
StencilSystem build_first_order(const NodeSet& nodes, std::span<const double> field, std::size_t i,
                                const RowWeighting& weighting, bool normalized);

/// Second-order Taylor system; 2D columns (dx, dy, dx^2/2, dx dy, dy^2/2), 1D (dx, dx^2/2).
StencilSystem build_second_order(const NodeSet& nodes, std::span<const double> field, std::size_t i,
                                 const RowWeighting& weighting, bool normalized = false);

/// Builds either system over an explicit neighbor list.
StencilSystem build_taylor_system(const NodeSet& nodes, std::span<const double> field, const NeighborList& nl,
                                  int order, const RowWeighting& weighting, bool normalized);

DerivativeEstimate solve_wlsq(const StencilSystem& system);

Eigen::VectorXd gradient(const NodeSet& nodes, std::span<const double> field, std::size_t i,
                         const RowWeighting& weighting, bool normalized);

DerivativeEstimate derivatives2(const NodeSet& nodes, std::span<const double> field, std::size_t i,
                                const RowWeighting& weighting);

/// Stencil over the radius neighbors of i (radius taken from the weighting;
/// identity weighting needs r_e set as well).
StencilCoefficients stencil_coefficients(const NodeSet& nodes, std::size_t i, const RowWeighting& weighting,
                                         Derivative target, int order, bool normalized);

/// Stencil over an explicit neighbor list.
StencilCoefficients stencil_coefficients(const NodeSet& nodes, const NeighborList& nl, const RowWeighting& weighting,
                                         Derivative target, int order, bool normalized);

} // namespace partop
