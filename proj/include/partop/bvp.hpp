#pragma once

#include "partop/lsq.hpp"
#include "partop/nodes.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace partop::bvp {

// Two-point problem phi'' = x on (-1, 1) with phi(-1) = phi(1) = 0, discretized
// with least-squares second-derivative stencils of M nodes each.

/// How the M-1 stencil neighbors of a node are chosen.
///
/// centered: the M consecutive nodes around i (in sorted order), the odd extra
/// node on the side of the nearer candidate, shifted inward at the ends.
/// nearest: the M-1 closest nodes, ties by ascending index. The two rules agree
/// on regular nodes; on strongly perturbed nodes the nearest rule can give two
/// nodes the same three-point stencil and thus a singular global matrix.
enum class Selection { centered, nearest };

struct Config
{
    std::size_t m_total = 21;
    std::size_t m = 3; ///< stencil size including the center node
    double rho_rnd = 0.0;
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7};
    RowWeighting weighting = RowWeighting::identity();
    bool normalized = false;
    Selection selection = Selection::centered;

    /// Throws InvalidArgument when a field is out of range.
    void validate() const;
    double dx() const { return 2.0 / static_cast<double>(m_total - 1); }
};

double exact_solution(double x);

double source(double x);

/// Stencil neighbors of node i of a sorted 1D node set.
NeighborList stencil_neighbors(const NodeSet& nodes, std::size_t i, std::size_t m, Selection selection);

struct GlobalSystem
{
    Eigen::MatrixXd matrix;
    Eigen::VectorXd rhs;
};

GlobalSystem assemble(const NodeSet& nodes, const Config& config);

struct Solution
{
    NodeSet nodes;
    std::vector<double> values;
    std::vector<double> exact;
    double max_error = 0.0;
    double l2_error = 0.0;        ///< root mean square of pointwise errors
    double residual_ratio = 0.0;  ///< |K phi - f| / |f| of the global solve
};

Solution solve(const NodeSet& nodes, const Config& config);

struct MemberSummary
{
    std::uint64_t seed;
    Solution solution;
};

struct EnsembleReport
{
    double rho_rnd = 0.0;
    std::vector<MemberSummary> members;
    std::vector<double> grid;       ///< regular grid the mean curve is sampled on
    std::vector<double> mean_curve; ///< mean over members of their local interpolants
    double mean_max_error = 0.0;
    double max_max_error = 0.0;
};

/// Value of a solved member at x, from the order-2 interpolant around the
/// nearest node over that node's M-1 nearest neighbors.
double sample(const Solution& solution, const Config& config, double x);

/// One solve per seed on perturbed nodes.
EnsembleReport run_ensemble(const Config& config);

struct ConvergenceRow
{
    double dx;
    double mean_max_error;
    std::optional<double> observed_order; ///< empty on the first row and below the noise floor
    bool exact = false;                   ///< both errors of the interval below the noise floor
};

inline constexpr double kNoiseFloor = 1e-10;

/// Ensemble-mean max error per spacing and log2 error ratios between rows.
std::vector<ConvergenceRow> convergence_study(const Config& base, const std::vector<double>& dx_list);

} // namespace partop::bvp
