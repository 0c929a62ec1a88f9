#include "partop/bvp.hpp"

#include "partop/ddin.hpp"
#include "partop/error.hpp"

#include <Eigen/LU>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace partop::bvp {

void Config::validate() const
{
    if (m < 3) {
        throw InvalidArgument(fmt::format("stencil size M must be at least 3, got {}", m));
    }
    if (m_total <= m) {
        throw InvalidArgument(fmt::format("M_total ({}) must exceed the stencil size M ({})", m_total, m));
    }
    if (!(rho_rnd >= 0.0 && rho_rnd < 1.0)) {
        throw InvalidArgument(fmt::format("rho must lie in [0, 1), got {}", rho_rnd));
    }
    if (weighting.kind == RowWeighting::Kind::mps && !(weighting.r_e > 0.0)) {
        throw InvalidArgument(fmt::format("mps weighting needs a positive r_e, got {}", weighting.r_e));
    }
}

double exact_solution(double x)
{
    // adding +0 turns the -0 produced at x = -1 into +0
    return x * (x * x - 1.0) / 6.0 + 0.0;
}

double source(double x)
{
    return x;
}

NeighborList stencil_neighbors(const NodeSet& nodes, std::size_t i, std::size_t m, Selection selection)
{
    const std::size_t n = nodes.size();
    if (m < 2 || m > n) {
        throw InvalidArgument(fmt::format("stencil size {} invalid for {} nodes", m, n));
    }
    if (selection == Selection::nearest) {
        return nearest_neighbors(nodes, i, m - 1);
    }
    if (i >= n) {
        throw InvalidArgument(fmt::format("node index {} out of range (size {})", i, n));
    }
    const std::size_t k = m - 1;
    std::size_t left = k / 2;
    if (k % 2 == 1 && i >= left + 1 && i + left + 1 < n) {
        const double dl = nodes[i].x() - nodes[i - left - 1].x();
        const double dr = nodes[i + left + 1].x() - nodes[i].x();
        left += dl <= dr ? 1 : 0;
    }
    left = std::min(left, i);
    std::size_t right = k - left;
    if (i + right > n - 1) {
        right = n - 1 - i;
        left = k - right;
    }
    NeighborList nl{i, {}};
    for (std::size_t j = i - left; j <= i + right; ++j) {
        if (j != i) {
            const Point offset = nodes[j] - nodes[i];
            nl.neighbors.push_back({j, offset, offset.norm(), 0.0});
        }
    }
    return nl;
}

GlobalSystem assemble(const NodeSet& nodes, const Config& config)
{
    config.validate();
    if (nodes.dim() != 1) {
        throw InvalidArgument("the boundary value problem is one-dimensional");
    }
    const std::size_t n = nodes.size();
    if (n <= config.m - 1) {
        throw InvalidArgument(fmt::format("{} nodes cannot supply {} stencil neighbors", n, config.m - 1));
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (!(nodes[i].x() > nodes[i - 1].x())) {
            throw InvalidArgument(fmt::format("nodes must be sorted ascending (node {})", i));
        }
    }
    if (nodes[0].x() != -1.0 || nodes[n - 1].x() != 1.0) {
        throw InvalidArgument("first and last nodes must sit at -1 and +1");
    }

    GlobalSystem sys{Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)),
                     Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n))};
    sys.matrix(0, 0) = 1.0;
    sys.matrix(static_cast<Eigen::Index>(n - 1), static_cast<Eigen::Index>(n - 1)) = 1.0;

    for (std::size_t i = 1; i + 1 < n; ++i) {
        const NeighborList nl = stencil_neighbors(nodes, i, config.m, config.selection);
        StencilCoefficients st;
        try {
            st = stencil_coefficients(nodes, nl, config.weighting, Derivative::dxx, 2, config.normalized);
        } catch (const DegenerateStencil& e) {
            throw DegenerateStencil(fmt::format("node {} (x = {:.17g}): {}", i, nodes[i].x(), e.what()), e.condition());
        } catch (const Error& e) {
            throw Error(fmt::format("node {} (x = {:.17g}): {}", i, nodes[i].x(), e.what()));
        }
        const auto row = static_cast<Eigen::Index>(i);
        sys.matrix(row, row) += st.center;
        for (std::size_t k = 0; k < st.neighbors.size(); ++k) {
            sys.matrix(row, static_cast<Eigen::Index>(st.neighbor_indices[k])) += st.neighbors[k];
        }
        sys.rhs[row] = source(nodes[i].x());
    }
    return sys;
}

Solution solve(const NodeSet& nodes, const Config& config)
{
    const GlobalSystem sys = assemble(nodes, config);
    // The Dirichlet rows are identity rows, so their unknowns are known. Move
    // their columns to the right-hand side and factor only the interior block;
    // pivoting across the full matrix would otherwise leave roundoff at the ends.
    const Eigen::Index n_all = sys.matrix.rows();
    const Eigen::Index m = n_all - 2;
    const double left = sys.rhs[0];
    const double right = sys.rhs[n_all - 1];
    const Eigen::VectorXd inner_rhs = sys.rhs.segment(1, m) - sys.matrix.col(0).segment(1, m) * left
        - sys.matrix.col(n_all - 1).segment(1, m) * right;
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys.matrix.block(1, 1, m, m));
    const Eigen::VectorXd inner = lu.solve(inner_rhs);
    if (!inner.allFinite() || std::abs(lu.determinant()) == 0.0) {
        throw Error("global system is singular");
    }
    Eigen::VectorXd phi(n_all);
    phi[0] = left;
    phi.segment(1, m) = inner;
    phi[n_all - 1] = right;

    Solution out{nodes, {}, {}, 0.0, 0.0, 0.0};
    const std::size_t n = nodes.size();
    out.values.resize(n);
    out.exact.resize(n);
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        out.values[i] = phi[static_cast<Eigen::Index>(i)];
        out.exact[i] = exact_solution(nodes[i].x());
        const double err = std::abs(out.values[i] - out.exact[i]);
        out.max_error = std::max(out.max_error, err);
        sq += err * err;
    }
    out.l2_error = std::sqrt(sq / static_cast<double>(n));
    out.residual_ratio = (sys.matrix * phi - sys.rhs).norm() / sys.rhs.norm();
    return out;
}

double sample(const Solution& solution, const Config& config, double x)
{
    const auto& pts = solution.nodes.positions();
    const auto it = std::lower_bound(pts.begin(), pts.end(), x, [](const Point& p, double v) { return p.x() < v; });
    std::size_t nearest = static_cast<std::size_t>(it - pts.begin());
    if (nearest == pts.size() || (nearest > 0 && x - pts[nearest - 1].x() <= pts[nearest].x() - x)) {
        nearest -= 1;
    }
    const NeighborList nl = stencil_neighbors(solution.nodes, nearest, config.m, config.selection);
    const ddin::Interpolant interp =
        ddin::fit(solution.nodes, solution.values, nl, ddin::power_basis(2, 1), config.weighting);
    return ddin::evaluate(interp, Point(x, 0.0));
}

EnsembleReport run_ensemble(const Config& config)
{
    config.validate();
    if (config.seeds.empty()) {
        throw InvalidArgument("ensemble needs at least one seed");
    }
    EnsembleReport report;
    report.rho_rnd = config.rho_rnd;
    const NodeSet regular = generate_regular_1d(config.m_total);
    for (const Point& p : regular.positions()) {
        report.grid.push_back(p.x());
    }
    report.mean_curve.assign(report.grid.size(), 0.0);

    for (std::uint64_t seed : config.seeds) {
        try {
            Solution sol = solve(generate_perturbed_1d(config.m_total, config.rho_rnd, seed), config);
            for (std::size_t k = 0; k < report.grid.size(); ++k) {
                report.mean_curve[k] += sample(sol, config, report.grid[k]);
            }
            report.mean_max_error += sol.max_error;
            report.max_max_error = std::max(report.max_max_error, sol.max_error);
            report.members.push_back({seed, std::move(sol)});
        } catch (const Error& e) {
            throw Error(fmt::format("ensemble member with seed {} failed: {}", seed, e.what()));
        }
    }
    const auto count = static_cast<double>(config.seeds.size());
    for (double& v : report.mean_curve) {
        v /= count;
    }
    report.mean_max_error /= count;
    return report;
}

std::vector<ConvergenceRow> convergence_study(const Config& base, const std::vector<double>& dx_list)
{
    if (dx_list.size() < 3) {
        throw InvalidArgument(fmt::format("need >= 3 spacings, got {}", dx_list.size()));
    }
    std::vector<ConvergenceRow> rows;
    for (std::size_t k = 0; k < dx_list.size(); ++k) {
        const double dx = dx_list[k];
        if (!(dx > 0.0) || dx > 2.0) {
            throw InvalidArgument(fmt::format("spacing {} outside (0, 2]", dx));
        }
        if (k > 0 && std::abs(dx - 0.5 * dx_list[k - 1]) > 1e-9 * dx) {
            throw InvalidArgument(fmt::format("spacing {} does not halve the previous spacing {}", dx, dx_list[k - 1]));
        }
        const double intervals = std::round(2.0 / dx);
        if (std::abs(2.0 / intervals - dx) > 1e-9 * dx) {
            throw InvalidArgument(fmt::format("spacing {} does not divide [-1, 1] evenly", dx));
        }
        Config cfg = base;
        cfg.m_total = static_cast<std::size_t>(intervals) + 1;
        const EnsembleReport report = run_ensemble(cfg);

        ConvergenceRow row{dx, report.mean_max_error, std::nullopt, report.mean_max_error < kNoiseFloor};
        if (k > 0 && !row.exact && !rows.back().exact) {
            row.observed_order = std::log2(rows.back().mean_max_error / row.mean_max_error);
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace partop::bvp
