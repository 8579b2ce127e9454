#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "chess/image.hpp"
#include "chess/ring.hpp"
#include "chess/select.hpp"

namespace chess {

/// Signed orientation measures for one feature.
///
/// m[n] is the n-th sum-response term without the absolute value,
/// M_n = (I_n + I_{n+8}) - (I_{n+4} + I_{n+12}). am3[n] holds 3*AM_n, the
/// three-term average of neighbouring measures kept in integer form. The
/// sequence M is anti-periodic (M_{n+4} = -M_n), so wrapping past either end
/// flips the sign of the wrapped term.
struct OrientationMeasures {
    std::array<std::int32_t, 4> m;
    std::array<std::int32_t, 4> am3;
    int bin = 0; // 0..7, steps of 22.5 degrees
};

inline std::array<std::int32_t, 4> measures(const SampleVector& s) {
    std::array<std::int32_t, 4> m;
    for (int n = 0; n < 4; ++n)
        m[n] = (s[n] + s[n + 8]) - (s[n + 4] + s[n + 12]);
    return m;
}

/// Assigns one of 8 orientation bins from the ring samples, or nullopt when
/// the samples carry no orientation (all averaged measures zero).
///
/// bin = argmax_n |AM_n|, moved to the opposite half (bin + 4) when the
/// corresponding M is negative; an exact M of zero stays in the positive
/// half. Argmax ties resolve to the smallest index.
inline std::optional<OrientationMeasures> orientation_measures(const SampleVector& s) {
    OrientationMeasures om;
    om.m = measures(s);
    om.am3[0] = -om.m[3] + om.m[0] + om.m[1];
    om.am3[1] = om.m[0] + om.m[1] + om.m[2];
    om.am3[2] = om.m[1] + om.m[2] + om.m[3];
    om.am3[3] = om.m[2] + om.m[3] - om.m[0];

    int best = 0;
    std::int32_t best_abs = std::abs(om.am3[0]);
    for (int n = 1; n < 4; ++n) {
        const std::int32_t a = std::abs(om.am3[n]);
        if (a > best_abs) {
            best = n;
            best_abs = a;
        }
    }
    if (best_abs == 0) return std::nullopt;

    om.bin = om.m[best] < 0 ? best + 4 : best;
    return om;
}

inline std::optional<int> orientation_bin(const SampleVector& s) {
    const auto om = orientation_measures(s);
    if (!om) return std::nullopt;
    return om->bin;
}

/// Labels selected features in place, sampling the source image at each
/// feature's integer maximum. Labelling runs after selection because doing it
/// for every pixel would be wasted work. Features too close to the border for
/// ring sampling keep an unset bin.
inline void label_features(const GrayImage& img, const RingGeometry& geom,
                           std::vector<Feature>& features) {
    for (Feature& f : features) {
        const int x = f.ix, y = f.iy;
        if (x < geom.margin || y < geom.margin || x >= img.width() - geom.margin ||
            y >= img.height() - geom.margin) {
            f.orientation_bin.reset();
            continue;
        }
        f.orientation_bin = orientation_bin(sample_ring(img, x, y, geom));
    }
}

} // namespace chess
