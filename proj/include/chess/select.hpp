#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "chess/image.hpp"

namespace chess {

/// A selected feature. (ix, iy) is the integer response maximum the sub-pixel
/// refinement started from; (x, y) is within 2.5 px of it.
struct Feature {
    double x = 0.0;
    double y = 0.0;
    double strength = 0.0; // response value at (ix, iy)
    int ix = 0;
    int iy = 0;
    std::optional<int> orientation_bin; // 0..7, set by label_features()
};

struct SelectConfig {
    int nms_window = 5;
    int neighbourhood_area = 64;
    double neighbourhood_proportion = 0.1;
    bool require_connectivity = true;
};

/// True where the response is strictly positive.
template <typename T>
inline BoolImage positive_mask(const Image<T>& resp) {
    BoolImage mask(resp.width(), resp.height(), 0);
    for (int y = 0; y < resp.height(); ++y)
        for (int x = 0; x < resp.width(); ++x)
            mask(x, y) = resp(x, y) > T{0} ? 1 : 0;
    return mask;
}

/// Positions whose positive response is maximal over a centred window.
/// Equal values tie-break lexicographically by (y, x): the earlier position
/// wins and the later one is suppressed. Output is in scan order.
template <typename T>
inline std::vector<Pixel> non_max_suppress(const Image<T>& resp, int window) {
    if (window < 3 || window % 2 == 0)
        throw std::invalid_argument("non_max_suppress: window must be odd and >= 3");
    const int half = window / 2;
    std::vector<Pixel> maxima;
    for (int y = 0; y < resp.height(); ++y) {
        for (int x = 0; x < resp.width(); ++x) {
            const T v = resp(x, y);
            if (!(v > T{0})) continue;
            bool is_max = true;
            const int y0 = std::max(0, y - half), y1 = std::min(resp.height() - 1, y + half);
            const int x0 = std::max(0, x - half), x1 = std::min(resp.width() - 1, x + half);
            for (int qy = y0; qy <= y1 && is_max; ++qy) {
                for (int qx = x0; qx <= x1; ++qx) {
                    if (qx == x && qy == y) continue;
                    const T q = resp(qx, qy);
                    if (q > v || (q == v && (qy < y || (qy == y && qx < x)))) {
                        is_max = false;
                        break;
                    }
                }
            }
            if (is_max) maxima.push_back({x, y});
        }
    }
    return maxima;
}

/// Drops candidates with no positive response in their 8-neighbourhood.
/// True vertex responses span several pixels; isolated positives are noise.
template <typename T>
inline std::vector<Pixel> connectivity_filter(const Image<T>& resp,
                                              const std::vector<Pixel>& candidates) {
    std::vector<Pixel> kept;
    kept.reserve(candidates.size());
    for (const Pixel& c : candidates) {
        bool connected = false;
        for (int dy = -1; dy <= 1 && !connected; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                if (dx == 0 && dy == 0) continue;
                const int qx = c.x + dx, qy = c.y + dy;
                if (resp.in_bounds(qx, qy) && resp(qx, qy) > T{0}) {
                    connected = true;
                    break;
                }
            }
        }
        if (connected) kept.push_back(c);
    }
    return kept;
}

/// Drops candidates much weaker than the strongest candidate nearby.
/// The image is tiled into area x area tiles; each candidate is compared
/// against the maximum over its own tile and the 8 neighbouring tiles.
template <typename T>
inline std::vector<Pixel> neighbourhood_compare(const Image<T>& resp,
                                                const std::vector<Pixel>& candidates,
                                                int area, double proportion) {
    if (area < 1) throw std::invalid_argument("neighbourhood_compare: area must be >= 1");
    if (!(proportion > 0.0 && proportion <= 1.0))
        throw std::invalid_argument("neighbourhood_compare: proportion must be in (0, 1]");
    if (candidates.empty()) return {};

    const int tiles_x = (resp.width() + area - 1) / area;
    const int tiles_y = (resp.height() + area - 1) / area;
    std::vector<double> tile_max(static_cast<std::size_t>(tiles_x) * tiles_y, 0.0);
    for (const Pixel& c : candidates) {
        double& m = tile_max[static_cast<std::size_t>(c.y / area) * tiles_x + c.x / area];
        m = std::max(m, static_cast<double>(resp(c.x, c.y)));
    }

    std::vector<Pixel> kept;
    kept.reserve(candidates.size());
    for (const Pixel& c : candidates) {
        const int tx = c.x / area, ty = c.y / area;
        double region_max = 0.0;
        for (int qy = std::max(0, ty - 1); qy <= std::min(tiles_y - 1, ty + 1); ++qy)
            for (int qx = std::max(0, tx - 1); qx <= std::min(tiles_x - 1, tx + 1); ++qx)
                region_max = std::max(region_max, tile_max[static_cast<std::size_t>(qy) * tiles_x + qx]);
        if (static_cast<double>(resp(c.x, c.y)) >= proportion * region_max) kept.push_back(c);
    }
    return kept;
}

/// Centre of mass of max(response, 0) over the 5x5 patch around an integer
/// maximum. Negative responses carry no mass; a zero patch returns the input.
template <typename T>
inline Point2 subpixel_com(const Image<T>& resp, int x, int y) {
    if (x < 2 || y < 2 || x >= resp.width() - 2 || y >= resp.height() - 2)
        throw std::out_of_range("subpixel_com: 5x5 patch would leave the image");
    double wsum = 0.0, wx = 0.0, wy = 0.0;
    for (int dy = -2; dy <= 2; ++dy) {
        for (int dx = -2; dx <= 2; ++dx) {
            const double v = static_cast<double>(resp(x + dx, y + dy));
            if (v <= 0.0) continue;
            wsum += v;
            wx += v * (x + dx);
            wy += v * (y + dy);
        }
    }
    if (wsum == 0.0) return {static_cast<double>(x), static_cast<double>(y)};
    return {wx / wsum, wy / wsum};
}

/// Full selection pipeline: positive threshold, NMS, connectivity,
/// neighbourhood comparison, centre-of-mass refinement. Features come back
/// sorted by descending strength (ties by y then x). Orientation bins are
/// left unset; see label_features().
template <typename T>
inline std::vector<Feature> select_features(const Image<T>& resp, const SelectConfig& cfg) {
    std::vector<Pixel> candidates = non_max_suppress(resp, cfg.nms_window);
    if (cfg.require_connectivity) candidates = connectivity_filter(resp, candidates);
    candidates = neighbourhood_compare(resp, candidates, cfg.neighbourhood_area,
                                       cfg.neighbourhood_proportion);

    std::vector<Feature> features;
    features.reserve(candidates.size());
    for (const Pixel& c : candidates) {
        Feature f;
        const bool refinable =
            c.x >= 2 && c.y >= 2 && c.x < resp.width() - 2 && c.y < resp.height() - 2;
        const Point2 p = refinable ? subpixel_com(resp, c.x, c.y)
                                   : Point2{static_cast<double>(c.x), static_cast<double>(c.y)};
        f.x = p.x;
        f.y = p.y;
        f.strength = static_cast<double>(resp(c.x, c.y));
        f.ix = c.x;
        f.iy = c.y;
        features.push_back(f);
    }
    std::sort(features.begin(), features.end(), [](const Feature& a, const Feature& b) {
        if (a.strength != b.strength) return a.strength > b.strength;
        if (a.iy != b.iy) return a.iy < b.iy;
        return a.ix < b.ix;
    });
    return features;
}

} // namespace chess
