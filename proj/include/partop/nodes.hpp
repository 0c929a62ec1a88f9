#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace partop {

/// Node coordinates. One-dimensional sets keep y == 0.
using Point = Eigen::Vector2d;

/// Identity of the pseudo-random generator behind every seeded generator.
inline constexpr std::string_view kRngName = "mt19937_64/53bit-uniform";

/// Immutable set of distinct nodes in one or two dimensions.
class NodeSet
{
public:
    /// Validates count >= 2, finite coordinates and pairwise-distinct positions.
    NodeSet(int dim, std::vector<Point> positions);

    int dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return positions_.size(); }
    const Point& operator[](std::size_t i) const { return positions_[i]; }
    const std::vector<Point>& positions() const noexcept { return positions_; }

    /// Smallest distance between two distinct nodes.
    double min_spacing() const;

private:
    int dim_;
    std::vector<Point> positions_;
};

struct WeightParams
{
    double r_e; ///< cutoff radius
};

/// MPS kernel r_e/r - 1 inside the cutoff, 0 outside. Throws for r <= 0.
double weight(double r, const WeightParams& params);

struct Neighbor
{
    std::size_t index;
    Point offset;    ///< r_j - r_i
    double distance; ///< |r_j - r_i|
    double weight;   ///< w(|r_j - r_i|)
};

struct NeighborList
{
    std::size_t center;
    std::vector<Neighbor> neighbors; ///< ascending node index

    bool empty() const noexcept { return neighbors.empty(); }
    std::size_t size() const noexcept { return neighbors.size(); }
};

/// Node sets at or above this size are searched through a uniform bin grid.
inline constexpr std::size_t kBinnedSearchThreshold = 10000;

/// Fixed-radius neighbor search over one node set.
///
/// Small sets are scanned pairwise; large sets are bucketed into square cells
/// of edge r_e so each query visits the 3^dim surrounding cells. Both paths
/// return identical lists.
class NeighborSearch
{
public:
    enum class Strategy { automatic, brute_force, binned };

    NeighborSearch(const NodeSet& nodes, WeightParams params, Strategy strategy = Strategy::automatic);

    NeighborList query(std::size_t center) const;

    bool binned() const noexcept { return binned_; }

private:
    std::vector<std::size_t> candidates(std::size_t center) const;

    const NodeSet* nodes_;
    WeightParams params_;
    bool binned_ = false;
    Point origin_;
    long nx_ = 1;
    long ny_ = 1;
    std::vector<std::vector<std::size_t>> cells_;
};

/// Nodes j with 0 < |r_j - r_i| < r_e, each carrying offset, distance and weight.
NeighborList find_neighbors(const NodeSet& nodes, std::size_t i, const WeightParams& params);

/// The k nodes closest to i (excluding i), ordered by distance then index.
/// Weights are left at zero; callers attach whichever weighting they use.
NeighborList nearest_neighbors(const NodeSet& nodes, std::size_t i, std::size_t k);

/// Sum of neighbor weights.
double particle_number_density(const NeighborList& nl);

/// Weighted mean squared neighbor distance. Throws for an empty list.
double lambda_coefficient(const NeighborList& nl);

/// M_total equally spaced nodes on [-1, 1].
NodeSet generate_regular_1d(std::size_t m_total);

/// Regular nodes with interior nodes shifted by uniform noise in (-rho*dx, rho*dx).
///
/// The end nodes stay at -1 and +1. Returned nodes are sorted ascending, which
/// only reorders anything when rho_rnd > 0.5. If two nodes end up closer than
/// 1e-9*dx the draw is repeated with seed + 1.
NodeSet generate_perturbed_1d(std::size_t m_total, double rho_rnd, std::uint64_t seed);

/// nx-by-ny grid starting at the origin, row-major in x, each coordinate
/// perturbed by uniform noise of half-width jitter*spacing.
NodeSet generate_grid_2d(std::size_t nx, std::size_t ny, double spacing, double jitter, std::uint64_t seed);

/// CSV with header `index,x[,y]` and 17 significant digits.
void write_nodes_csv(std::ostream& out, const NodeSet& nodes);
NodeSet read_nodes_csv(std::istream& in);

} // namespace partop
