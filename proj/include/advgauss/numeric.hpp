#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace advgauss {

/// Ceiling that ignores relative round-off below 1e-12, so a quantity that
/// is an integer in exact arithmetic (e.g. ln(e²) = 2) is not bumped up by one.
inline std::int64_t ceil_to_int(double x) {
    const double nearest = std::round(x);
    if (std::abs(x - nearest) <= 1e-12 * std::max(1.0, std::abs(x))) {
        return static_cast<std::int64_t>(nearest);
    }
    return static_cast<std::int64_t>(std::ceil(x));
}

}  // namespace advgauss
