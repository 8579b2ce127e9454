#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>

#include "chess/image.hpp"

namespace chess {

struct PixelOffset {
    int dx = 0;
    int dy = 0;
    bool operator==(const PixelOffset&) const = default;
};

/// Intensities gathered around the sampling ring, widened to 32-bit.
using SampleVector = std::array<std::int32_t, 16>;
using LocalSamples = std::array<std::int32_t, 5>;

/// The 16-point sampling ring plus the centre pixel set used for the local
/// mean. Immutable once built; safe to share across threads.
///
/// Ring order starts at offsets[0] = (+radius, 0) and proceeds in increasing
/// atan2(dy, dx), i.e. sweeping from the +x axis towards +y (downwards in
/// image coordinates). Opposite samples are 8 indices apart.
struct RingGeometry {
    std::array<PixelOffset, 16> offsets;
    std::array<PixelOffset, 5> local_offsets;
    int radius = 0;
    int margin = 0;
};

/// Builds the sampling geometry for radius 5 or 10.
///
/// The radius-5 offsets are the unique integer lattice points matching the
/// alternating 21.8/23.2 degree spacing; radius 10 doubles them, which keeps
/// the same sampling angles.
inline RingGeometry build_ring(int radius) {
    if (radius != 5 && radius != 10)
        throw std::invalid_argument("build_ring: radius must be 5 or 10");

    static constexpr std::array<PixelOffset, 16> base = {{
        {5, 0},  {5, 2},   {4, 4},   {2, 5},
        {0, 5},  {-2, 5},  {-4, 4},  {-5, 2},
        {-5, 0}, {-5, -2}, {-4, -4}, {-2, -5},
        {0, -5}, {2, -5},  {4, -4},  {5, -2},
    }};
    static constexpr std::array<PixelOffset, 5> base_local = {{
        {0, 0}, {1, 0}, {-1, 0}, {0, 1}, {0, -1},
    }};

    const int scale = radius / 5;
    RingGeometry geom;
    for (std::size_t i = 0; i < base.size(); ++i)
        geom.offsets[i] = {base[i].dx * scale, base[i].dy * scale};
    for (std::size_t i = 0; i < base_local.size(); ++i)
        geom.local_offsets[i] = {base_local[i].dx * scale, base_local[i].dy * scale};
    geom.radius = radius;
    geom.margin = radius;
    return geom;
}

namespace detail {

template <typename T>
inline void check_margin(const Image<T>& img, int x, int y, int margin, const char* who) {
    if (x < margin || y < margin || x >= img.width() - margin || y >= img.height() - margin)
        throw std::out_of_range(std::string(who) + ": coordinate inside margin band");
}

} // namespace detail

/// Gathers the 16 ring intensities around (x, y), in ring order.
template <typename T>
inline SampleVector sample_ring(const Image<T>& img, int x, int y, const RingGeometry& geom) {
    detail::check_margin(img, x, y, geom.margin, "sample_ring");
    SampleVector samples;
    for (std::size_t i = 0; i < geom.offsets.size(); ++i)
        samples[i] = static_cast<std::int32_t>(img(x + geom.offsets[i].dx, y + geom.offsets[i].dy));
    return samples;
}

/// Gathers the 5 centre intensities used for the local mean.
template <typename T>
inline LocalSamples sample_local(const Image<T>& img, int x, int y, const RingGeometry& geom) {
    detail::check_margin(img, x, y, geom.margin, "sample_local");
    LocalSamples samples;
    for (std::size_t i = 0; i < geom.local_offsets.size(); ++i)
        samples[i] =
            static_cast<std::int32_t>(img(x + geom.local_offsets[i].dx, y + geom.local_offsets[i].dy));
    return samples;
}

} // namespace chess
