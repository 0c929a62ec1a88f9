#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace partop::checks {

struct CheckResult
{
    std::string name;
    std::string configuration;
    double residual = 0.0;
    double bound = 0.0;
    bool pass = false;
};

/// Cross-operator battery: MPS against the five-point stencil, least-squares
/// consistency on polynomials, normalization and weight-scaling invariance,
/// stencil extraction, DDIN against the Taylor systems, pressure-force
/// momentum balance and regular-node BVP exactness.
std::vector<CheckResult> run_battery(std::uint64_t seed);

} // namespace partop::checks
