#pragma once

#include <array>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>

#include "chess/image.hpp"
#include "chess/ring.hpp"

namespace chess {

/// Response values are stored as 5*R so the whole computation stays in exact
/// integer arithmetic: 16 * mean_response expands to |5*sum(ring) -
/// 16*sum(local)| / 5, so 5*R = 5*SR - 5*DR - |5*sum(ring) - 16*sum(local)|.
/// Divide by response_scale at an API boundary if the natural unit is wanted;
/// every comparison made by feature selection is scale-free.
constexpr int response_scale = 5;

/// Sum response: large when opposite ring samples agree and quadrature
/// samples disagree, the signature of a chess-board vertex.
inline std::int32_t sum_response(const SampleVector& s) {
    std::int32_t sr = 0;
    for (int n = 0; n < 4; ++n)
        sr += std::abs((s[n] + s[n + 8]) - (s[n + 4] + s[n + 12]));
    return sr;
}

/// Diff response: large when opposite ring samples disagree, the signature of
/// an edge. Subtracted from the sum response to suppress edge false positives.
inline std::int32_t diff_response(const SampleVector& s) {
    std::int32_t dr = 0;
    for (int n = 0; n < 8; ++n)
        dr += std::abs(s[n] - s[n + 8]);
    return dr;
}

/// Absolute difference between the ring mean and the centre mean. Suppresses
/// solid stripes, which produce the same ring samples as a vertex but a
/// non-intermediate centre. Exact rational value |5*sum(ring) - 16*sum(local)| / 80.
inline double mean_response(const SampleVector& ring, const LocalSamples& local) {
    std::int64_t ring_sum = 0, local_sum = 0;
    for (std::int32_t v : ring) ring_sum += v;
    for (std::int32_t v : local) local_sum += v;
    return static_cast<double>(std::abs(5 * ring_sum - 16 * local_sum)) / 80.0;
}

/// Overall response at one pixel, in fifths (5*R). Positive values indicate
/// vertex-likeness.
inline std::int32_t response_at(const GrayImage& img, int x, int y, const RingGeometry& geom) {
    const SampleVector ring = sample_ring(img, x, y, geom);
    const LocalSamples local = sample_local(img, x, y, geom);
    std::int32_t ring_sum = 0, local_sum = 0;
    for (std::int32_t v : ring) ring_sum += v;
    for (std::int32_t v : local) local_sum += v;
    return 5 * sum_response(ring) - 5 * diff_response(ring) -
           std::abs(5 * ring_sum - 16 * local_sum);
}

/// Whole-image response. Values inside the margin band are 0 by definition.
/// Pure function of the input; rows are independent.
///
/// The loop body is written against precomputed flat offsets so the compiler
/// can keep everything in registers; tests check it bit-exact against the
/// compositional response_at() path.
inline ResponseImage detect(const GrayImage& img, const RingGeometry& geom) {
    const int m = geom.margin;
    if (img.width() < 2 * m + 1 || img.height() < 2 * m + 1)
        throw std::invalid_argument("detect: image too small for sampling margin");

    ResponseImage resp(img.width(), img.height(), 0);
    const int stride = img.width();

    std::array<std::ptrdiff_t, 16> off;
    for (int i = 0; i < 16; ++i)
        off[i] = static_cast<std::ptrdiff_t>(geom.offsets[i].dy) * stride + geom.offsets[i].dx;
    std::array<std::ptrdiff_t, 5> loc;
    for (int i = 0; i < 5; ++i)
        loc[i] = static_cast<std::ptrdiff_t>(geom.local_offsets[i].dy) * stride +
                 geom.local_offsets[i].dx;

    for (int y = m; y < img.height() - m; ++y) {
        const std::uint8_t* src = img.row(y);
        std::int32_t* dst = resp.row(y);
        for (int x = m; x < img.width() - m; ++x) {
            const std::uint8_t* p = src + x;
            std::int32_t s[16];
            for (int i = 0; i < 16; ++i) s[i] = p[off[i]];

            std::int32_t sr = 0;
            std::int32_t ring_sum = 0;
            for (int n = 0; n < 4; ++n) {
                const std::int32_t a = s[n] + s[n + 8];
                const std::int32_t b = s[n + 4] + s[n + 12];
                ring_sum += a + b;
                sr += std::abs(a - b);
            }
            std::int32_t dr = 0;
            for (int n = 0; n < 8; ++n) dr += std::abs(s[n] - s[n + 8]);

            std::int32_t local_sum = 0;
            for (int i = 0; i < 5; ++i) local_sum += p[loc[i]];

            dst[x] = 5 * sr - 5 * dr - std::abs(5 * ring_sum - 16 * local_sum);
        }
    }
    return resp;
}

// ---------------------------------------------------------------------------
// Separable Gaussian pre-blur.

enum class BlurKernel {
    gauss3, // [1 3 1]/5, two 1D passes
    gauss5, // [1 4 6 4 1]/16, two 1D passes
};

/// Separable integer Gaussian blur, horizontal then vertical pass,
/// clamp-to-edge borders. The division happens once at the end, rounding to
/// nearest (ties away from zero), so the result equals direct convolution
/// with the outer-product 2D kernel.
inline GrayImage pre_blur(const GrayImage& img, BlurKernel kernel) {
    const int* taps;
    int half, denom;
    static constexpr int g3[] = {1, 3, 1};
    static constexpr int g5[] = {1, 4, 6, 4, 1};
    if (kernel == BlurKernel::gauss3) {
        taps = g3;
        half = 1;
        denom = 5 * 5;
    } else {
        taps = g5;
        half = 2;
        denom = 16 * 16;
    }

    const int w = img.width(), h = img.height();
    Image<std::int32_t> tmp(w, h, 0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::int32_t acc = 0;
            for (int k = -half; k <= half; ++k)
                acc += taps[k + half] * img.clamped(x + k, y);
            tmp(x, y) = acc;
        }
    }
    GrayImage out(w, h, 0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::int64_t acc = 0;
            for (int k = -half; k <= half; ++k)
                acc += taps[k + half] * tmp.clamped(x, y + k);
            out(x, y) = static_cast<std::uint8_t>((2 * acc + denom) / (2 * denom));
        }
    }
    return out;
}

} // namespace chess
