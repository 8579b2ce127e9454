#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "chess/detector.hpp"
#include "chess/image.hpp"

namespace chess {

/// Where the true edges sit relative to the pixel grid.
/// grid_aligned puts edges on pixel boundaries (the vertex lands on a
/// half-integer coordinate); half_pixel puts them through pixel centres, which
/// inserts a transition row and column at mid intensity 128 and moves the
/// vertex to an integer coordinate. Real edges fall between the two extremes.
enum class OffsetMode { grid_aligned, half_pixel };

struct SynthSpec {
    double angle_deg = 0.0;
    OffsetMode offset_mode = OffsetMode::grid_aligned;
    int dark = 64;
    int light = 191;
    double noise_variance = 0.0;
    std::uint64_t seed = 0;
    std::optional<BlurKernel> blur; // applied before noise
    int width = 640;
    int height = 480;
    std::optional<Point2> vertex; // defaults to the canvas centre for the mode
};

/// Vertices (and the rotation pivot) must stay this far inside the canvas so
/// that ring sampling and the 5x5 refinement patch never leave the image.
constexpr int synth_margin = 16;

namespace detail {

// SplitMix64 finalizer; the noise generator is counter-based on the pixel
// index so tiled rendering reproduces the sequential image.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline double unit_open(std::uint64_t v) {
    // (0, 1]; never 0 so log() is safe.
    return (static_cast<double>(v >> 11) + 1.0) * 0x1.0p-53;
}

/// Two independent standard normals for one counter value.
inline void gauss_pair(std::uint64_t key, std::uint64_t counter, double& z0, double& z1) {
    const std::uint64_t h = mix64(key ^ mix64(counter + 1));
    const double u1 = unit_open(mix64(h));
    const double u2 = unit_open(mix64(h ^ 0x5851f42d4c957f2dull));
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    z0 = r * std::cos(t);
    z1 = r * std::sin(t);
}

inline std::uint8_t round_u8(double v) {
    const long r = std::lround(v);
    return static_cast<std::uint8_t>(r < 0 ? 0 : (r > 255 ? 255 : r));
}

/// Renders the canvas by rotating an analytically-defined pattern about a
/// pivot: each output pixel is mapped back by the inverse rotation and the
/// pattern is sampled with bilinear interpolation on its integer lattice.
template <typename PatternFn>
inline GrayImage render_rotated(int width, int height, double angle_deg, Point2 pivot,
                                PatternFn&& pattern) {
    GrayImage img(width, height);
    const double rad = angle_deg * std::numbers::pi / 180.0;
    const double c = std::cos(rad), s = std::sin(rad);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double dx = x - pivot.x, dy = y - pivot.y;
            const double u = c * dx + s * dy + pivot.x;
            const double v = -s * dx + c * dy + pivot.y;
            const double fu = std::floor(u), fv = std::floor(v);
            const int iu = static_cast<int>(fu), iv = static_cast<int>(fv);
            const double ax = u - fu, ay = v - fv;
            const double val = (1.0 - ax) * (1.0 - ay) * pattern(iu, iv) +
                               ax * (1.0 - ay) * pattern(iu + 1, iv) +
                               (1.0 - ax) * ay * pattern(iu, iv + 1) +
                               ax * ay * pattern(iu + 1, iv + 1);
            img(x, y) = round_u8(val);
        }
    }
    return img;
}

inline void check_colours(const SynthSpec& spec) {
    if (!(0 <= spec.dark && spec.dark < spec.light && spec.light <= 255))
        throw std::invalid_argument("synth: need 0 <= dark < light <= 255");
    if (spec.noise_variance < 0.0)
        throw std::invalid_argument("synth: noise variance must be >= 0");
    if (spec.width < 64 || spec.height < 64)
        throw std::invalid_argument("synth: canvas must be at least 64x64");
}

inline bool near_integer(double v) { return std::abs(v - std::round(v)) < 1e-9; }

} // namespace detail

/// Adds i.i.d. Gaussian noise of the given variance to every pixel,
/// saturating at 0 and 255. Deterministic for a given seed.
inline GrayImage add_noise(const GrayImage& img, double variance, std::uint64_t seed) {
    if (variance < 0.0) throw std::invalid_argument("add_noise: variance must be >= 0");
    if (variance == 0.0) return img;
    const double sigma = std::sqrt(variance);
    GrayImage out(img.width(), img.height());
    const std::size_t n = img.size();
    for (std::size_t i = 0; i < n; i += 2) {
        double z0, z1;
        detail::gauss_pair(seed, i >> 1, z0, z1);
        out.data()[i] = detail::round_u8(img.data()[i] + sigma * z0);
        if (i + 1 < n) out.data()[i + 1] = detail::round_u8(img.data()[i + 1] + sigma * z1);
    }
    return out;
}

struct VertexImage {
    GrayImage image;
    Point2 vertex; // exact ground truth, stored before rasterization
};

/// Renders one simulated chess-board vertex: two dark and two light quadrants
/// meeting at the vertex, rotated by angle_deg about it with bilinear
/// interpolation, then optionally blurred, then noised.
inline VertexImage render_vertex(const SynthSpec& spec) {
    detail::check_colours(spec);

    Point2 g;
    if (spec.vertex) {
        g = *spec.vertex;
    } else if (spec.offset_mode == OffsetMode::grid_aligned) {
        g = {spec.width / 2 - 0.5, spec.height / 2 - 0.5};
    } else {
        g = {static_cast<double>(spec.width / 2), static_cast<double>(spec.height / 2)};
    }
    if (g.x < synth_margin || g.y < synth_margin || g.x > spec.width - 1 - synth_margin ||
        g.y > spec.height - 1 - synth_margin)
        throw std::invalid_argument("render_vertex: vertex too close to the canvas border");

    const int dark = spec.dark, light = spec.light;
    GrayImage img;
    if (spec.offset_mode == OffsetMode::grid_aligned) {
        if (!detail::near_integer(g.x - 0.5) || !detail::near_integer(g.y - 0.5))
            throw std::invalid_argument(
                "render_vertex: grid_aligned vertex must sit on a half-integer coordinate");
        img = detail::render_rotated(spec.width, spec.height, spec.angle_deg, g,
                                     [&](int i, int j) -> double {
                                         return ((i < g.x) == (j < g.y)) ? dark : light;
                                     });
    } else {
        if (!detail::near_integer(g.x) || !detail::near_integer(g.y))
            throw std::invalid_argument(
                "render_vertex: half_pixel vertex must sit on an integer coordinate");
        const int cx = static_cast<int>(std::lround(g.x));
        const int cy = static_cast<int>(std::lround(g.y));
        img = detail::render_rotated(spec.width, spec.height, spec.angle_deg, g,
                                     [&](int i, int j) -> double {
                                         if (i == cx || j == cy) return 128.0;
                                         return ((i < cx) == (j < cy)) ? dark : light;
                                     });
    }

    if (spec.blur) img = pre_blur(img, *spec.blur);
    if (spec.noise_variance > 0.0) img = add_noise(img, spec.noise_variance, spec.seed);
    return {std::move(img), g};
}

// ---------------------------------------------------------------------------
// Flat key=value serialization of the render parameters.

inline std::string to_key_values(const SynthSpec& spec) {
    std::ostringstream out;
    char num[64];
    std::snprintf(num, sizeof num, "%.17g", spec.angle_deg);
    out << "angle_deg=" << num << "\n";
    out << "offset_mode="
        << (spec.offset_mode == OffsetMode::grid_aligned ? "grid-aligned" : "half-pixel") << "\n";
    out << "dark=" << spec.dark << "\nlight=" << spec.light << "\n";
    std::snprintf(num, sizeof num, "%.17g", spec.noise_variance);
    out << "noise_variance=" << num << "\n";
    out << "seed=" << spec.seed << "\n";
    out << "blur="
        << (!spec.blur ? "none" : (*spec.blur == BlurKernel::gauss3 ? "gauss3" : "gauss5")) << "\n";
    out << "width=" << spec.width << "\nheight=" << spec.height << "\n";
    if (spec.vertex) {
        std::snprintf(num, sizeof num, "%.17g", spec.vertex->x);
        out << "vertex_x=" << num << "\n";
        std::snprintf(num, sizeof num, "%.17g", spec.vertex->y);
        out << "vertex_y=" << num << "\n";
    }
    return out.str();
}

/// Parses the to_key_values() format. Missing keys keep their defaults;
/// unknown keys or malformed lines are errors.
inline SynthSpec synth_spec_from_key_values(const std::string& text) {
    SynthSpec spec;
    std::optional<double> vx, vy;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("synth spec: malformed line: " + line);
        const std::string key = line.substr(0, eq), value = line.substr(eq + 1);
        try {
            if (key == "angle_deg") spec.angle_deg = std::stod(value);
            else if (key == "offset_mode") {
                if (value == "grid-aligned") spec.offset_mode = OffsetMode::grid_aligned;
                else if (value == "half-pixel") spec.offset_mode = OffsetMode::half_pixel;
                else throw std::invalid_argument("");
            } else if (key == "dark") spec.dark = std::stoi(value);
            else if (key == "light") spec.light = std::stoi(value);
            else if (key == "noise_variance") spec.noise_variance = std::stod(value);
            else if (key == "seed") spec.seed = std::stoull(value);
            else if (key == "blur") {
                if (value == "none") spec.blur.reset();
                else if (value == "gauss3") spec.blur = BlurKernel::gauss3;
                else if (value == "gauss5") spec.blur = BlurKernel::gauss5;
                else throw std::invalid_argument("");
            } else if (key == "width") spec.width = std::stoi(value);
            else if (key == "height") spec.height = std::stoi(value);
            else if (key == "vertex_x") vx = std::stod(value);
            else if (key == "vertex_y") vy = std::stod(value);
            else throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw std::invalid_argument("synth spec: bad entry: " + line);
        }
    }
    if (vx.has_value() != vy.has_value())
        throw std::invalid_argument("synth spec: vertex_x and vertex_y must appear together");
    if (vx) spec.vertex = Point2{*vx, *vy};
    return spec;
}

struct BoardImage {
    GrayImage image;
    std::vector<Point2> vertices; // interior vertices, row-major
};

/// Renders a rows x cols chess-board of square_px squares centred on the
/// canvas, rotated about the board centre, on a dark background. Ground truth
/// is the rotated interior vertex lattice, exact by construction.
inline BoardImage render_board(int rows, int cols, int square_px, const SynthSpec& spec) {
    detail::check_colours(spec);
    if (rows < 2 || cols < 2 || square_px < 2)
        throw std::invalid_argument("render_board: need rows, cols >= 2 and square_px >= 2");

    const int bw = cols * square_px, bh = rows * square_px;
    const int bx = (spec.width - bw) / 2, by = (spec.height - bh) / 2;
    const bool half = spec.offset_mode == OffsetMode::half_pixel;
    // Pattern-frame edge coordinate of vertex column/row k.
    const double edge0_x = half ? bx : bx - 0.5;
    const double edge0_y = half ? by : by - 0.5;
    const Point2 pivot = {edge0_x + bw / 2.0, edge0_y + bh / 2.0};

    const double rad = spec.angle_deg * std::numbers::pi / 180.0;
    const double c = std::cos(rad), s = std::sin(rad);
    std::vector<Point2> vertices;
    vertices.reserve(static_cast<std::size_t>(rows - 1) * (cols - 1));
    for (int j = 1; j < rows; ++j) {
        for (int i = 1; i < cols; ++i) {
            const double px = edge0_x + i * square_px, py = edge0_y + j * square_px;
            const double dx = px - pivot.x, dy = py - pivot.y;
            Point2 v = {c * dx - s * dy + pivot.x, s * dx + c * dy + pivot.y};
            if (v.x < synth_margin || v.y < synth_margin || v.x > spec.width - 1 - synth_margin ||
                v.y > spec.height - 1 - synth_margin)
                throw std::invalid_argument("render_board: board does not fit inside the canvas");
            vertices.push_back(v);
        }
    }

    const int dark = spec.dark, light = spec.light;
    auto square_colour = [&](int sx, int sy) -> double {
        if (sx < 0 || sx >= cols || sy < 0 || sy >= rows) return dark; // background
        return ((sx + sy) % 2 == 0) ? dark : light;
    };
    GrayImage img;
    if (!half) {
        img = detail::render_rotated(spec.width, spec.height, spec.angle_deg, pivot,
                                     [&](int i, int j) -> double {
                                         const int sx = static_cast<int>(std::floor(
                                             static_cast<double>(i - bx) / square_px));
                                         const int sy = static_cast<int>(std::floor(
                                             static_cast<double>(j - by) / square_px));
                                         return square_colour(sx, sy);
                                     });
    } else {
        img = detail::render_rotated(
            spec.width, spec.height, spec.angle_deg, pivot, [&](int i, int j) -> double {
                const int tx = i - bx, ty = j - by;
                const bool on_vx = tx % square_px == 0 && tx >= 0 && tx <= bw;
                const bool on_vy = ty % square_px == 0 && ty >= 0 && ty <= bh;
                const bool inside_x = tx >= 0 && tx <= bw, inside_y = ty >= 0 && ty <= bh;
                if ((on_vx && inside_y) || (on_vy && inside_x)) return 128.0;
                const int sx = static_cast<int>(std::floor(static_cast<double>(tx) / square_px));
                const int sy = static_cast<int>(std::floor(static_cast<double>(ty) / square_px));
                return square_colour(sx, sy);
            });
    }

    if (spec.blur) img = pre_blur(img, *spec.blur);
    if (spec.noise_variance > 0.0) img = add_noise(img, spec.noise_variance, spec.seed);
    return {std::move(img), std::move(vertices)};
}

} // namespace chess
