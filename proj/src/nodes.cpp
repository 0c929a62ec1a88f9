#include "partop/nodes.hpp"

#include "partop/error.hpp"
#include "random.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

namespace partop {

NodeSet::NodeSet(int dim, std::vector<Point> positions)
    : dim_(dim)
    , positions_(std::move(positions))
{
    if (dim_ != 1 && dim_ != 2) {
        throw InvalidArgument(fmt::format("node set dimension must be 1 or 2, got {}", dim_));
    }
    if (positions_.size() < 2) {
        throw InvalidArgument("node set needs at least 2 nodes");
    }
    for (std::size_t i = 0; i < positions_.size(); ++i) {
        const Point& p = positions_[i];
        if (!std::isfinite(p.x()) || !std::isfinite(p.y())) {
            throw InvalidArgument(fmt::format("node {} has a non-finite coordinate", i));
        }
        if (dim_ == 1 && p.y() != 0.0) {
            throw InvalidArgument(fmt::format("node {} of a 1D set has nonzero y", i));
        }
    }

    std::vector<std::size_t> order(positions_.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [this](std::size_t a, std::size_t b) {
        const Point& pa = positions_[a];
        const Point& pb = positions_[b];
        return pa.x() < pb.x() || (pa.x() == pb.x() && pa.y() < pb.y());
    });
    for (std::size_t k = 1; k < order.size(); ++k) {
        if (positions_[order[k]] == positions_[order[k - 1]]) {
            throw InvalidArgument(fmt::format("nodes {} and {} coincide", order[k - 1], order[k]));
        }
    }
}

double NodeSet::min_spacing() const
{
    double best = std::numeric_limits<double>::infinity();
    if (dim_ == 1) {
        std::vector<double> xs(positions_.size());
        std::transform(positions_.begin(), positions_.end(), xs.begin(), [](const Point& p) { return p.x(); });
        std::sort(xs.begin(), xs.end());
        for (std::size_t k = 1; k < xs.size(); ++k) {
            best = std::min(best, xs[k] - xs[k - 1]);
        }
        return best;
    }
    for (std::size_t i = 0; i < positions_.size(); ++i) {
        for (std::size_t j = i + 1; j < positions_.size(); ++j) {
            best = std::min(best, (positions_[j] - positions_[i]).norm());
        }
    }
    return best;
}

double weight(double r, const WeightParams& params)
{
    if (!(params.r_e > 0.0)) {
        throw InvalidArgument(fmt::format("cutoff radius must be positive, got {}", params.r_e));
    }
    if (!(r > 0.0)) {
        throw InvalidArgument(fmt::format("weight function is singular at r = {} (coincident nodes)", r));
    }
    return r < params.r_e ? params.r_e / r - 1.0 : 0.0;
}

NeighborSearch::NeighborSearch(const NodeSet& nodes, WeightParams params, Strategy strategy)
    : nodes_(&nodes)
    , params_(params)
{
    if (!(params_.r_e > 0.0)) {
        throw InvalidArgument(fmt::format("cutoff radius must be positive, got {}", params_.r_e));
    }
    binned_ = strategy == Strategy::binned
        || (strategy == Strategy::automatic && nodes.size() >= kBinnedSearchThreshold);
    if (!binned_) {
        return;
    }

    Point lo = nodes[0];
    Point hi = nodes[0];
    for (const Point& p : nodes.positions()) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    origin_ = lo;
    nx_ = static_cast<long>(std::floor((hi.x() - lo.x()) / params_.r_e)) + 1;
    ny_ = nodes.dim() == 2 ? static_cast<long>(std::floor((hi.y() - lo.y()) / params_.r_e)) + 1 : 1;
    cells_.resize(static_cast<std::size_t>(nx_ * ny_));
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        const long cx = static_cast<long>(std::floor((nodes[j].x() - origin_.x()) / params_.r_e));
        const long cy = nodes.dim() == 2 ? static_cast<long>(std::floor((nodes[j].y() - origin_.y()) / params_.r_e)) : 0;
        cells_[static_cast<std::size_t>(cy * nx_ + cx)].push_back(j);
    }
}

std::vector<std::size_t> NeighborSearch::candidates(std::size_t center) const
{
    std::vector<std::size_t> out;
    if (!binned_) {
        out.resize(nodes_->size());
        std::iota(out.begin(), out.end(), std::size_t{0});
        return out;
    }
    const Point& c = (*nodes_)[center];
    const long cx = static_cast<long>(std::floor((c.x() - origin_.x()) / params_.r_e));
    const long cy = nodes_->dim() == 2 ? static_cast<long>(std::floor((c.y() - origin_.y()) / params_.r_e)) : 0;
    for (long y = std::max(0L, cy - 1); y <= std::min(ny_ - 1, cy + 1); ++y) {
        for (long x = std::max(0L, cx - 1); x <= std::min(nx_ - 1, cx + 1); ++x) {
            const auto& cell = cells_[static_cast<std::size_t>(y * nx_ + x)];
            out.insert(out.end(), cell.begin(), cell.end());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

NeighborList NeighborSearch::query(std::size_t center) const
{
    if (center >= nodes_->size()) {
        throw InvalidArgument(fmt::format("node index {} out of range (size {})", center, nodes_->size()));
    }
    NeighborList nl{center, {}};
    const Point& c = (*nodes_)[center];
    for (std::size_t j : candidates(center)) {
        if (j == center) {
            continue;
        }
        const Point offset = (*nodes_)[j] - c;
        const double distance = offset.norm();
        if (distance > 0.0 && distance < params_.r_e) {
            const double w = weight(distance, params_);
            if (w > 0.0) {
                nl.neighbors.push_back({j, offset, distance, w});
            }
        }
    }
    return nl;
}

NeighborList find_neighbors(const NodeSet& nodes, std::size_t i, const WeightParams& params)
{
    return NeighborSearch(nodes, params).query(i);
}

NeighborList nearest_neighbors(const NodeSet& nodes, std::size_t i, std::size_t k)
{
    if (i >= nodes.size()) {
        throw InvalidArgument(fmt::format("node index {} out of range (size {})", i, nodes.size()));
    }
    if (k == 0 || k >= nodes.size()) {
        throw InvalidArgument(fmt::format("cannot select {} nearest neighbors from {} nodes", k, nodes.size()));
    }
    std::vector<Neighbor> all;
    all.reserve(nodes.size() - 1);
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        if (j != i) {
            const Point offset = nodes[j] - nodes[i];
            all.push_back({j, offset, offset.norm(), 0.0});
        }
    }
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(),
                      [](const Neighbor& a, const Neighbor& b) {
                          return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
                      });
    all.resize(k);
    return {i, std::move(all)};
}

double particle_number_density(const NeighborList& nl)
{
    double n = 0.0;
    for (const Neighbor& nb : nl.neighbors) {
        n += nb.weight;
    }
    return n;
}

double lambda_coefficient(const NeighborList& nl)
{
    if (nl.empty()) {
        throw IsolatedNode(nl.center);
    }
    double num = 0.0;
    double den = 0.0;
    for (const Neighbor& nb : nl.neighbors) {
        num += nb.distance * nb.distance * nb.weight;
        den += nb.weight;
    }
    if (!(den > 0.0)) {
        throw IsolatedNode(nl.center);
    }
    return num / den;
}

NodeSet generate_regular_1d(std::size_t m_total)
{
    if (m_total < 2) {
        throw InvalidArgument(fmt::format("M_total must be at least 2, got {}", m_total));
    }
    const double dx = 2.0 / static_cast<double>(m_total - 1);
    std::vector<Point> pts(m_total, Point::Zero());
    for (std::size_t i = 0; i < m_total; ++i) {
        pts[i].x() = -1.0 + static_cast<double>(i) * dx;
    }
    pts.back().x() = 1.0;
    return NodeSet(1, std::move(pts));
}

NodeSet generate_perturbed_1d(std::size_t m_total, double rho_rnd, std::uint64_t seed)
{
    if (!(rho_rnd >= 0.0 && rho_rnd < 1.0)) {
        throw InvalidArgument(fmt::format("rho_rnd must lie in [0, 1), got {}", rho_rnd));
    }
    const NodeSet regular = generate_regular_1d(m_total);
    if (rho_rnd == 0.0) {
        return regular;
    }
    const double dx = 2.0 / static_cast<double>(m_total - 1);
    for (std::uint64_t s = seed;; ++s) {
        detail::UniformSource rng(s);
        std::vector<double> xs(m_total);
        xs.front() = -1.0;
        xs.back() = 1.0;
        for (std::size_t i = 1; i + 1 < m_total; ++i) {
            xs[i] = regular[i].x() + rng.symmetric(rho_rnd * dx);
        }
        std::sort(xs.begin(), xs.end());
        bool collision = false;
        for (std::size_t i = 1; i < m_total; ++i) {
            collision = collision || xs[i] - xs[i - 1] < 1e-9 * dx;
        }
        if (!collision) {
            std::vector<Point> pts(m_total, Point::Zero());
            for (std::size_t i = 0; i < m_total; ++i) {
                pts[i].x() = xs[i];
            }
            return NodeSet(1, std::move(pts));
        }
    }
}

NodeSet generate_grid_2d(std::size_t nx, std::size_t ny, double spacing, double jitter, std::uint64_t seed)
{
    if (nx < 2 || ny < 2) {
        throw InvalidArgument(fmt::format("grid needs at least 2x2 nodes, got {}x{}", nx, ny));
    }
    if (!(spacing > 0.0) || !std::isfinite(spacing)) {
        throw InvalidArgument(fmt::format("grid spacing must be positive, got {}", spacing));
    }
    if (!(jitter >= 0.0 && jitter < 0.5)) {
        throw InvalidArgument(fmt::format("jitter must lie in [0, 0.5), got {}", jitter));
    }
    detail::UniformSource rng(seed);
    std::vector<Point> pts;
    pts.reserve(nx * ny);
    for (std::size_t iy = 0; iy < ny; ++iy) {
        for (std::size_t ix = 0; ix < nx; ++ix) {
            Point p(static_cast<double>(ix) * spacing, static_cast<double>(iy) * spacing);
            if (jitter > 0.0) {
                p.x() += rng.symmetric(jitter * spacing);
                p.y() += rng.symmetric(jitter * spacing);
            }
            pts.push_back(p);
        }
    }
    return NodeSet(2, std::move(pts));
}

void write_nodes_csv(std::ostream& out, const NodeSet& nodes)
{
    out << (nodes.dim() == 2 ? "index,x,y\n" : "index,x\n");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes.dim() == 2) {
            out << fmt::format("{},{:.17g},{:.17g}\n", i, nodes[i].x(), nodes[i].y());
        } else {
            out << fmt::format("{},{:.17g}\n", i, nodes[i].x());
        }
    }
}

NodeSet read_nodes_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line)) {
        throw InvalidArgument("node CSV is empty");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    int dim = 0;
    if (line == "index,x") {
        dim = 1;
    } else if (line == "index,x,y") {
        dim = 2;
    } else {
        throw InvalidArgument(fmt::format("unexpected node CSV header '{}'", line));
    }

    std::vector<Point> pts;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        std::istringstream fields(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(fields, cell, ',')) {
            cells.push_back(cell);
        }
        if (cells.size() != static_cast<std::size_t>(dim) + 1) {
            throw InvalidArgument(fmt::format("node CSV row {} has {} fields, expected {}", row, cells.size(), dim + 1));
        }
        try {
            if (std::stoull(cells[0]) != row) {
                throw InvalidArgument(fmt::format("node CSV row {} carries index {}", row, cells[0]));
            }
            Point p(std::stod(cells[1]), dim == 2 ? std::stod(cells[2]) : 0.0);
            pts.push_back(p);
        } catch (const std::logic_error&) {
            throw InvalidArgument(fmt::format("node CSV row {} is not numeric: '{}'", row, line));
        }
        ++row;
    }
    return NodeSet(dim, std::move(pts));
}

} // namespace partop
