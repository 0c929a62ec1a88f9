#include "partop/checks.hpp"

#include "partop/bvp.hpp"
#include "partop/ddin.hpp"
#include "partop/lsq.hpp"
#include "partop/mps.hpp"
#include "random.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace partop::checks {

namespace {

constexpr int kTrials = 100;
constexpr int kClouds = 20;

double relative(const Eigen::VectorXd& got, const Eigen::VectorXd& want)
{
    const double scale = std::max(want.cwiseAbs().maxCoeff(), 1e-300);
    return (got - want).cwiseAbs().maxCoeff() / scale;
}

// Jittered 5x5 patch at a random scale; the center node is index 12.
struct Patch
{
    NodeSet nodes;
    RowWeighting weighting;
    static constexpr std::size_t center = 12;
};

Patch random_patch(detail::UniformSource& rng, std::uint64_t seed)
{
    const double h = rng.uniform(0.05, 1.0);
    return {generate_grid_2d(5, 5, h, 0.3, seed), RowWeighting::mps(2.1 * h)};
}

std::vector<double> sample_field(const NodeSet& nodes, const std::vector<double>& c)
{
    // c0 + c1 x + c2 y + c3 x^2 + c4 xy + c5 y^2
    std::vector<double> f(nodes.size());
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const double x = nodes[k].x();
        const double y = nodes[k].y();
        f[k] = c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * x * y + c[5] * y * y;
    }
    return f;
}

std::vector<double> random_coefficients(detail::UniformSource& rng, bool quadratic)
{
    std::vector<double> c(6, 0.0);
    for (std::size_t k = 0; k < (quadratic ? 6u : 3u); ++k) {
        c[k] = rng.uniform(-5.0, 5.0);
    }
    return c;
}

std::vector<double> random_field(detail::UniformSource& rng, std::size_t n, double lo, double hi)
{
    std::vector<double> f(n);
    for (double& v : f) {
        v = rng.uniform(lo, hi);
    }
    return f;
}

CheckResult make(std::string name, std::string configuration, double residual, double bound)
{
    return {std::move(name), std::move(configuration), residual, bound, residual <= bound};
}

CheckResult mps_five_point(std::uint64_t seed)
{
    detail::UniformSource rng(seed);
    const double h = 0.125;
    const NodeSet nodes = generate_grid_2d(7, 7, h, 0.0, seed);
    const WeightParams wp{1.2 * h};
    double worst = 0.0;
    for (int t = 0; t < kTrials; ++t) {
        const std::vector<double> f = random_field(rng, nodes.size(), -1.0, 1.0);
        for (std::size_t iy = 1; iy + 1 < 7; ++iy) {
            for (std::size_t ix = 1; ix + 1 < 7; ++ix) {
                const std::size_t c = iy * 7 + ix;
                MpsParams params{wp, 2, particle_number_density(find_neighbors(nodes, c, wp)), std::nullopt};
                const double got = mps_laplacian(f, nodes, c, params);
                const double fd = (f[c + 1] + f[c - 1] + f[c + 7] + f[c - 7] - 4.0 * f[c]) / (h * h);
                const double scale =
                    (std::abs(f[c + 1]) + std::abs(f[c - 1]) + std::abs(f[c + 7]) + std::abs(f[c - 7]) + 4 * std::abs(f[c]))
                    / (h * h);
                worst = std::max(worst, std::abs(got - fd) / scale);
            }
        }
    }
    return make("mps_five_point", fmt::format("grid=7x7;dx={};re={};fields={}", h, wp.r_e, kTrials), worst, 1e-12);
}

CheckResult lsq_affine(std::uint64_t seed)
{
    detail::UniformSource rng(seed + 101);
    double worst = 0.0;
    for (int t = 0; t < kTrials; ++t) {
        const Patch p = random_patch(rng, seed * 1000 + static_cast<std::uint64_t>(t));
        const auto c = random_coefficients(rng, false);
        const auto f = sample_field(p.nodes, c);
        const Eigen::Vector2d want(c[1], c[2]);
        for (bool normalized : {false, true}) {
            const Eigen::VectorXd g = gradient(p.nodes, f, Patch::center, p.weighting, normalized);
            worst = std::max(worst, (g - want).cwiseAbs().maxCoeff());
        }
    }
    return make("lsq_first_order_affine", fmt::format("patch=5x5;jitter=0.3;fields={}", kTrials), worst, 1e-10);
}

CheckResult lsq_quadratic(std::uint64_t seed)
{
    detail::UniformSource rng(seed + 202);
    double worst = 0.0;
    for (int t = 0; t < kTrials; ++t) {
        const Patch p = random_patch(rng, seed * 1000 + static_cast<std::uint64_t>(t));
        const auto c = random_coefficients(rng, true);
        const auto f = sample_field(p.nodes, c);
        const Point& x = p.nodes[Patch::center];
        Eigen::VectorXd want(5);
        want << c[1] + 2 * c[3] * x.x() + c[4] * x.y(), c[2] + c[4] * x.x() + 2 * c[5] * x.y(), 2 * c[3], c[4], 2 * c[5];
        const DerivativeEstimate est = derivatives2(p.nodes, f, Patch::center, p.weighting);
        worst = std::max(worst, (est.values - want).cwiseAbs().maxCoeff());
    }
    return make("lsq_second_order_quadratic", fmt::format("patch=5x5;jitter=0.3;fields={}", kTrials), worst, 1e-8);
}

CheckResult normalization_equivalence(std::uint64_t seed)
{
    detail::UniformSource rng(seed + 303);
    double worst = 0.0;
    for (int t = 0; t < kTrials; ++t) {
        const Patch p = random_patch(rng, seed * 1000 + static_cast<std::uint64_t>(t));
        const auto f = random_field(rng, p.nodes.size(), -1.0, 1.0);
        const StencilSystem normalized = build_first_order(p.nodes, f, Patch::center, p.weighting, true);
        StencilSystem plain = build_first_order(p.nodes, f, Patch::center, p.weighting, false);
        for (Eigen::Index r = 0; r < plain.rows.rows(); ++r) {
            plain.row_weights[r] *= normalized.rhs_scale[r] * normalized.rhs_scale[r];
        }
        worst = std::max(worst, relative(solve_wlsq(normalized).values, solve_wlsq(plain).values));
    }
    return make("lsq_normalization_equivalence", fmt::format("patch=5x5;configurations={}", kTrials), worst, 1e-12);
}

CheckResult weight_scaling(std::uint64_t seed)
{
    detail::UniformSource rng(seed + 404);
    double worst = 0.0;
    for (int t = 0; t < kTrials; ++t) {
        const Patch p = random_patch(rng, seed * 1000 + static_cast<std::uint64_t>(t));
        const auto f = random_field(rng, p.nodes.size(), -1.0, 1.0);
        const StencilSystem base = build_second_order(p.nodes, f, Patch::center, p.weighting);
        StencilSystem scaled = base;
        scaled.row_weights *= rng.uniform(0.01, 100.0);
        worst = std::max(worst, relative(solve_wlsq(scaled).values, solve_wlsq(base).values));
    }
    return make("lsq_weight_scaling_invariance", fmt::format("patch=5x5;configurations={}", kTrials), worst, 1e-13);
}

CheckResult stencil_equivalence(std::uint64_t seed)
{
    detail::UniformSource rng(seed + 505);
    double worst = 0.0;
    const Patch p = random_patch(rng, seed);
    const std::vector<std::pair<int, bool>> variants{{1, false}, {1, true}, {2, false}};
    for (auto [order, normalized] : variants) {
        const Derivative target = order == 1 ? Derivative::dy : Derivative::dxy;
        const StencilCoefficients st =
            stencil_coefficients(p.nodes, Patch::center, p.weighting, target, order, normalized);
        for (int t = 0; t < kTrials; ++t) {
            const auto f = random_field(rng, p.nodes.size(), -1.0, 1.0);
            const NeighborList nl = find_neighbors(p.nodes, Patch::center, WeightParams{p.weighting.r_e});
            const DerivativeEstimate est =
                solve_wlsq(build_taylor_system(p.nodes, f, nl, order, p.weighting, normalized));
            const double want = est[target];
            const double scale = std::max(est.values.cwiseAbs().maxCoeff(), 1e-300);
            worst = std::max(worst, std::abs(st.apply(f) - want) / scale);
        }
    }
    return make("stencil_coefficient_equivalence", fmt::format("patch=5x5;fields={}", kTrials), worst, 1e-13);
}

CheckResult ddin_equivalence(std::uint64_t seed, int order)
{
    detail::UniformSource rng(seed + 606 + static_cast<std::uint64_t>(order));
    double worst = 0.0;
    for (int t = 0; t < kTrials; ++t) {
        const Patch p = random_patch(rng, seed * 1000 + static_cast<std::uint64_t>(t));
        const auto f = random_field(rng, p.nodes.size(), -1.0, 1.0);
        const ddin::Interpolant interp = ddin::fit(p.nodes, f, Patch::center, ddin::power_basis(order, 2), p.weighting);
        const StencilSystem sys = order == 1 ? build_first_order(p.nodes, f, Patch::center, p.weighting, false)
                                             : build_second_order(p.nodes, f, Patch::center, p.weighting);
        const DerivativeEstimate est = solve_wlsq(sys);
        Eigen::VectorXd got(est.values.size());
        for (std::size_t k = 0; k < est.labels.size(); ++k) {
            got[static_cast<Eigen::Index>(k)] = ddin::apply_operator(interp, ddin::to_operator(est.labels[k]));
        }
        worst = std::max(worst, relative(got, est.values));
    }
    return make(fmt::format("ddin_equivalence_order{}", order), fmt::format("patch=5x5;configurations={}", kTrials),
                worst, 1e-12);
}

CheckResult kg_force_sum(std::uint64_t seed)
{
    detail::UniformSource rng(seed + 707);
    double worst = 0.0;
    for (int t = 0; t < kClouds; ++t) {
        const NodeSet cloud = generate_grid_2d(6, 6, 1.0, 0.45, seed * 100 + static_cast<std::uint64_t>(t));
        const auto p = random_field(rng, cloud.size(), 0.0, 10.0);
        const WeightParams wp{2.1};
        const ForcePairParams fp{1.0, 1000.0, MpsParams{wp, 2, reference_number_density(2, 1.0, wp), std::nullopt}};
        const ForceBalance fb = force_balance(p, cloud, fp, PressureVariant::khayyer_gotoh);
        worst = std::max(worst, fb.relative_total());
    }
    return make("kg_force_sum", fmt::format("clouds={};grid=6x6;jitter=0.45;re=2.1", kClouds), worst, 1e-13);
}

CheckResult original_force_sum()
{
    // three particles on a line at unequal spacing with unequal pressures
    const NodeSet line(2, {Point(0.0, 0.0), Point(1.0, 0.0), Point(2.5, 0.0)});
    const std::vector<double> p{1.0, 5.0, 2.0};
    const WeightParams wp{3.0};
    const ForcePairParams fp{1.0, 1.0, MpsParams{wp, 2, 1.0, std::nullopt}};
    const ForceBalance fb = force_balance(p, line, fp, PressureVariant::original);
    const double threshold = 1e-6;
    // passes when momentum is NOT conserved
    return {"mps_original_force_sum", "line=0|1|2.5;p=1|5|2;re=3", fb.relative_total(), threshold,
            fb.relative_total() > threshold};
}

CheckResult bvp_regular()
{
    bvp::Config cfg;
    cfg.m_total = 21;
    cfg.m = 3;
    const bvp::Solution sol = bvp::solve(generate_regular_1d(cfg.m_total), cfg);
    return make("bvp_regular_exactness", "m_total=21;m=3;rho=0", sol.max_error, 1e-10);
}

} // namespace

std::vector<CheckResult> run_battery(std::uint64_t seed)
{
    return {
        mps_five_point(seed),
        lsq_affine(seed),
        lsq_quadratic(seed),
        normalization_equivalence(seed),
        weight_scaling(seed),
        stencil_equivalence(seed),
        ddin_equivalence(seed, 1),
        ddin_equivalence(seed, 2),
        kg_force_sum(seed),
        original_force_sum(),
        bvp_regular(),
    };
}

} // namespace partop::checks
