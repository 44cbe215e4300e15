#pragma once

// Point-spread measurements on a sampled image profile.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "ghostguide/error.hpp"

namespace ghostguide {

struct ShadowPeak {
    std::size_t index = 0;  ///< grid index of the minimum
    double position = 0.0;
    double value = 0.0;
    double left_zero = 0.0;   ///< first zero crossing left of the minimum
    double right_zero = 0.0;  ///< first zero crossing right of the minimum
    double half_width = 0.0;  ///< (right_zero - left_zero) / 2
    double side_lobe_min = std::numeric_limits<double>::infinity();  ///< minimum outside the central lobe
    double side_lobe_max = -std::numeric_limits<double>::infinity();
};

/// Locates the global minimum of a sampled profile and the zero crossings
/// that bound its negative lobe (linear interpolation between samples).
inline ShadowPeak analyze_shadow(const std::vector<double>& xs, const std::vector<double>& v) {
    if (xs.size() != v.size() || xs.size() < 3) {
        throw DimensionMismatch("profile needs matching x and value arrays with >= 3 samples");
    }
    ShadowPeak p;
    p.index = static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
    p.position = xs[p.index];
    p.value = v[p.index];
    if (!(p.value < 0.0)) {
        throw DomainError("profile has no negative peak");
    }
    auto crossing = [&](std::size_t a, std::size_t b) {
        return xs[a] + (xs[b] - xs[a]) * v[a] / (v[a] - v[b]);
    };
    std::size_t r = p.index;
    while (r + 1 < v.size() && v[r + 1] < 0.0) {
        ++r;
    }
    std::size_t l = p.index;
    while (l > 0 && v[l - 1] < 0.0) {
        --l;
    }
    p.right_zero = (r + 1 < v.size()) ? crossing(r, r + 1) : xs.back();
    p.left_zero = (l > 0) ? crossing(l - 1, l) : xs.front();
    p.half_width = 0.5 * (p.right_zero - p.left_zero);
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i < l || i > r) {
            p.side_lobe_min = std::min(p.side_lobe_min, v[i]);
            p.side_lobe_max = std::max(p.side_lobe_max, v[i]);
        }
    }
    return p;
}

}  // namespace ghostguide
