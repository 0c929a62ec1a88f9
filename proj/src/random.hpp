#pragma once

#include <cstdint>
#include <random>

namespace partop::detail {

// Uniform draws built from raw engine output so the sequence does not depend
// on the standard library's distribution implementation.
class UniformSource
{
public:
    explicit UniformSource(std::uint64_t seed)
        : engine_(seed)
    {
    }

    // Uniform on the open interval (-half_width, half_width).
    double symmetric(double half_width)
    {
        for (;;) {
            const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53; // [0, 1)
            const double s = 2.0 * u - 1.0;                                    // [-1, 1)
            if (s != -1.0) {
                return s * half_width;
            }
        }
    }

    // Uniform on [lo, hi).
    double uniform(double lo, double hi)
    {
        const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace partop::detail
