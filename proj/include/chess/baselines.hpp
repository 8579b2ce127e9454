#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "chess/image.hpp"

namespace chess {

/// Harris-Stephens parameters as used in the comparison: 5x5 Sobel aperture,
/// 3x3 block filter, k = 0.04. pre_blur selects whether the gradient operator
/// keeps its cross-smoothing component ([1 4 6 4 1]); disabling it gives the
/// "no initial smoothing" variant, a bare 1D derivative.
struct HarrisParams {
    int sobel_aperture = 5;
    int block_size = 3;
    double k = 0.04;
    bool pre_blur = true;
};

struct PtamParams {
    int gate = 10;
    double pre_blur_sigma = 1.0; // applied by the caller before detection
};

namespace detail {

// 5-tap derivative and smoothing components of the 5x5 Sobel operator.
// The smoothing tap is normalized (sum 16) so both gradient variants share
// the same derivative scale; absolute response magnitude is arbitrary anyway.
constexpr std::array<float, 5> sobel_deriv = {-1.f, -2.f, 0.f, 2.f, 1.f};
constexpr std::array<float, 5> sobel_smooth = {1.f / 16, 4.f / 16, 6.f / 16, 4.f / 16, 1.f / 16};

template <typename Src>
inline FloatImage conv1d_x(const Src& src, const std::array<float, 5>& taps) {
    FloatImage out(src.width(), src.height(), 0.f);
    for (int y = 0; y < src.height(); ++y)
        for (int x = 0; x < src.width(); ++x) {
            float acc = 0.f;
            for (int k = -2; k <= 2; ++k) acc += taps[k + 2] * static_cast<float>(src.clamped(x + k, y));
            out(x, y) = acc;
        }
    return out;
}

template <typename Src>
inline FloatImage conv1d_y(const Src& src, const std::array<float, 5>& taps) {
    FloatImage out(src.width(), src.height(), 0.f);
    for (int y = 0; y < src.height(); ++y)
        for (int x = 0; x < src.width(); ++x) {
            float acc = 0.f;
            for (int k = -2; k <= 2; ++k) acc += taps[k + 2] * static_cast<float>(src.clamped(x, y + k));
            out(x, y) = acc;
        }
    return out;
}

inline FloatImage box3_mean(const FloatImage& src) {
    FloatImage tmp(src.width(), src.height(), 0.f);
    for (int y = 0; y < src.height(); ++y)
        for (int x = 0; x < src.width(); ++x)
            tmp(x, y) = src.clamped(x - 1, y) + src(x, y) + src.clamped(x + 1, y);
    FloatImage out(src.width(), src.height(), 0.f);
    for (int y = 0; y < src.height(); ++y)
        for (int x = 0; x < src.width(); ++x)
            out(x, y) = (tmp.clamped(x, y - 1) + tmp(x, y) + tmp.clamped(x, y + 1)) / 9.f;
    return out;
}

} // namespace detail

/// Harris-Stephens corner response, det(A) - k*trace(A)^2 with A the 3x3
/// box-filtered gradient outer product. The 3-pixel border band (2 for the
/// gradient aperture, 1 for the box filter) is zeroed.
inline FloatImage harris_detect(const GrayImage& img, const HarrisParams& p) {
    if (p.sobel_aperture != 5 || p.block_size != 3)
        throw std::invalid_argument("harris_detect: only the 5x5 aperture / 3x3 block variant is supported");
    constexpr int border = 3;
    if (img.width() < 2 * border + 1 || img.height() < 2 * border + 1)
        throw std::invalid_argument("harris_detect: image too small");

    FloatImage ix = detail::conv1d_x(img, detail::sobel_deriv);
    FloatImage iy = detail::conv1d_y(img, detail::sobel_deriv);
    if (p.pre_blur) {
        ix = detail::conv1d_y(ix, detail::sobel_smooth);
        iy = detail::conv1d_x(iy, detail::sobel_smooth);
    }

    const int w = img.width(), h = img.height();
    FloatImage xx(w, h, 0.f), yy(w, h, 0.f), xy(w, h, 0.f);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const float gx = ix(x, y), gy = iy(x, y);
            xx(x, y) = gx * gx;
            yy(x, y) = gy * gy;
            xy(x, y) = gx * gy;
        }
    const FloatImage sxx = detail::box3_mean(xx);
    const FloatImage syy = detail::box3_mean(yy);
    const FloatImage sxy = detail::box3_mean(xy);

    FloatImage resp(w, h, 0.f);
    const float k = static_cast<float>(p.k);
    for (int y = border; y < h - border; ++y)
        for (int x = border; x < w - border; ++x) {
            const float a = sxx(x, y), b = syy(x, y), c = sxy(x, y);
            const float tr = a + b;
            resp(x, y) = a * b - c * c - k * tr * tr;
        }
    return resp;
}

/// PTAM-style grid corner test on the radius-3 FAST ring: thresholds are
/// placed a fixed gate either side of the 16-sample mean, transitions past
/// them are counted cyclically, and a pixel is flagged when exactly four
/// transitions occur and its own intensity stays within the gate of the ring
/// mean (a saddle has a mid-valued centre). All comparisons are done at
/// 16x scale to avoid dividing by the sample count.
inline BoolImage ptam_detect(const GrayImage& img, const PtamParams& p) {
    if (p.gate <= 0) throw std::invalid_argument("ptam_detect: gate must be positive");
    constexpr int margin = 3;
    static constexpr std::array<std::array<int, 2>, 16> ring = {{
        {0, -3}, {1, -3}, {2, -2}, {3, -1}, {3, 0}, {3, 1}, {2, 2}, {1, 3},
        {0, 3}, {-1, 3}, {-2, 2}, {-3, 1}, {-3, 0}, {-3, -1}, {-2, -2}, {-1, -3},
    }};

    BoolImage out(img.width(), img.height(), 0);
    if (img.width() < 2 * margin + 1 || img.height() < 2 * margin + 1) return out;

    const int stride = img.width();
    std::array<std::ptrdiff_t, 16> off;
    for (int i = 0; i < 16; ++i)
        off[i] = static_cast<std::ptrdiff_t>(ring[i][1]) * stride + ring[i][0];

    for (int y = margin; y < img.height() - margin; ++y) {
        const std::uint8_t* src = img.row(y);
        std::uint8_t* dst = out.row(y);
        for (int x = margin; x < img.width() - margin; ++x) {
            const std::uint8_t* q = src + x;
            std::int32_t s[16];
            std::int32_t sum = 0;
            for (int i = 0; i < 16; ++i) {
                s[i] = q[off[i]];
                sum += s[i];
            }
            const std::int32_t upper = sum + 16 * p.gate; // thresholds at 16x scale
            const std::int32_t lower = sum - 16 * p.gate;

            // Band per sample: +1 above the upper threshold, -1 below the
            // lower one, 0 in between. Count flips between extremes over one
            // full cycle, ignoring mid-band samples.
            int first = 0, prev = 0, transitions = 0;
            for (int i = 0; i < 16; ++i) {
                const std::int32_t v16 = 16 * s[i];
                const int band = v16 > upper ? 1 : (v16 < lower ? -1 : 0);
                if (band == 0) continue;
                if (prev == 0)
                    first = band;
                else if (band != prev)
                    ++transitions;
                prev = band;
            }
            if (prev != 0 && prev != first) ++transitions;

            const bool centre_mid = std::abs(16 * static_cast<std::int32_t>(*q) - sum) < 16 * p.gate;
            dst[x] = (transitions == 4 && centre_mid) ? 1 : 0;
        }
    }
    return out;
}

} // namespace chess
