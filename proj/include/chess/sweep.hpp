#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "chess/baselines.hpp"
#include "chess/detector.hpp"
#include "chess/image.hpp"
#include "chess/ring.hpp"
#include "chess/select.hpp"
#include "chess/synth.hpp"

namespace chess {

enum class Detector { chess, chess_blur5, harris, harris_noblur, ptam };
enum class Localization { integer_argmax, com5x5 };

inline std::vector<double> arange(double start, double step, double stop) {
    std::vector<double> out;
    for (int i = 0;; ++i) {
        const double v = start + i * step;
        if (v > stop + 1e-9) break;
        out.push_back(v);
    }
    return out;
}

/// Configuration of one rotation x noise accuracy grid. Per-cell seeds are
/// derived from (seed, angle index, variance index, trial), so cells are
/// independent of evaluation order and thread count.
struct SweepConfig {
    std::vector<double> angles = arange(0.0, 2.5, 90.0);
    std::vector<double> noise_variances = arange(0.0, 0.5, 10.0);
    Detector detector = Detector::chess;
    int ptam_gate = 10;
    OffsetMode offset_mode = OffsetMode::grid_aligned;
    Localization localization = Localization::integer_argmax;
    int trials_per_cell = 5;
    std::uint64_t seed = 0;
    int threads = 1;
    int width = 640;
    int height = 480;
};

/// Mean localization error per (angle, variance) cell. trials counts the
/// trials that produced a detection; a cell with none reads NaN.
struct ErrorGrid {
    std::vector<double> angles;
    std::vector<double> variances;
    std::vector<double> mean_error; // [angle-major]: index = ai * variances.size() + vi
    std::vector<int> trials;

    double& cell(std::size_t ai, std::size_t vi) { return mean_error[ai * variances.size() + vi]; }
    double cell(std::size_t ai, std::size_t vi) const {
        return mean_error[ai * variances.size() + vi];
    }
    int cell_trials(std::size_t ai, std::size_t vi) const {
        return trials[ai * variances.size() + vi];
    }
};

inline std::uint64_t cell_seed(std::uint64_t seed, std::size_t angle_index,
                               std::size_t variance_index, int trial) {
    using detail::mix64;
    return mix64(mix64(mix64(mix64(seed) ^ (angle_index + 1)) ^ ((variance_index + 1) << 20)) ^
                 (static_cast<std::uint64_t>(trial + 1) << 40));
}

namespace detail {

/// The minimal selection used by the accuracy grids: greatest positive
/// response that is 8-connected to another positive response.
template <typename T>
inline std::optional<Pixel> best_connected_response(const Image<T>& resp) {
    std::optional<Pixel> best;
    T best_v{};
    for (int y = 1; y < resp.height() - 1; ++y) {
        for (int x = 1; x < resp.width() - 1; ++x) {
            const T v = resp(x, y);
            if (!(v > T{0})) continue;
            if (best && !(v > best_v)) continue;
            bool connected = false;
            for (int dy = -1; dy <= 1 && !connected; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    if (resp(x + dx, y + dy) > T{0}) {
                        connected = true;
                        break;
                    }
                }
            if (connected) {
                best = Pixel{x, y};
                best_v = v;
            }
        }
    }
    return best;
}

template <typename T>
inline std::optional<Point2> localize(const Image<T>& resp, Localization loc) {
    const auto best = best_connected_response(resp);
    if (!best) return std::nullopt;
    if (loc == Localization::integer_argmax)
        return Point2{static_cast<double>(best->x), static_cast<double>(best->y)};
    return subpixel_com(resp, best->x, best->y);
}

struct CellAccum {
    double error_sum = 0.0;
    int detections = 0;
};

template <typename TrialFn>
inline ErrorGrid run_cells(const SweepConfig& cfg, TrialFn&& trial_fn) {
    if (cfg.angles.empty() || cfg.noise_variances.empty())
        throw std::invalid_argument("sweep: angle and variance lists must be non-empty");
    if (cfg.trials_per_cell < 1) throw std::invalid_argument("sweep: trials_per_cell must be >= 1");

    const std::size_t na = cfg.angles.size(), nv = cfg.noise_variances.size();
    ErrorGrid grid;
    grid.angles = cfg.angles;
    grid.variances = cfg.noise_variances;
    grid.mean_error.assign(na * nv, std::numeric_limits<double>::quiet_NaN());
    grid.trials.assign(na * nv, 0);

    auto run_cell = [&](std::size_t ci) {
        const std::size_t ai = ci / nv, vi = ci % nv;
        CellAccum acc;
        for (int t = 0; t < cfg.trials_per_cell; ++t) {
            const auto err = trial_fn(ai, vi, t);
            if (err) {
                acc.error_sum += *err;
                ++acc.detections;
            }
        }
        grid.trials[ci] = acc.detections;
        if (acc.detections > 0) grid.mean_error[ci] = acc.error_sum / acc.detections;
    };

    const int threads = std::max(1, cfg.threads);
    if (threads == 1) {
        for (std::size_t ci = 0; ci < na * nv; ++ci) run_cell(ci);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t ci = next.fetch_add(1); ci < na * nv; ci = next.fetch_add(1))
                run_cell(ci);
        };
        std::vector<std::thread> pool;
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return grid;
}

} // namespace detail

/// Rotation x noise accuracy grid: renders one simulated vertex per trial,
/// runs the configured detector, localizes the greatest connected response
/// and records its distance to the ground truth.
inline ErrorGrid run_sweep(const SweepConfig& cfg) {
    if (cfg.detector == Detector::ptam)
        throw std::invalid_argument("run_sweep: ptam has a binary response; use run_binary_sweep");
    const RingGeometry ring = build_ring(5);

    return detail::run_cells(cfg, [&](std::size_t ai, std::size_t vi,
                                      int t) -> std::optional<double> {
        SynthSpec sp;
        sp.angle_deg = cfg.angles[ai];
        sp.noise_variance = cfg.noise_variances[vi];
        sp.offset_mode = cfg.offset_mode;
        sp.blur = BlurKernel::gauss3; // simulated optics, part of the image protocol
        sp.seed = cell_seed(cfg.seed, ai, vi, t);
        sp.width = cfg.width;
        sp.height = cfg.height;
        const VertexImage vi_img = render_vertex(sp);

        std::optional<Point2> found;
        switch (cfg.detector) {
        case Detector::chess:
            found = detail::localize(detect(vi_img.image, ring), cfg.localization);
            break;
        case Detector::chess_blur5:
            found = detail::localize(detect(pre_blur(vi_img.image, BlurKernel::gauss5), ring),
                                     cfg.localization);
            break;
        case Detector::harris:
            found = detail::localize(harris_detect(vi_img.image, HarrisParams{}), cfg.localization);
            break;
        case Detector::harris_noblur: {
            HarrisParams hp;
            hp.pre_blur = false;
            found = detail::localize(harris_detect(vi_img.image, hp), cfg.localization);
            break;
        }
        case Detector::ptam:
            break;
        }
        if (!found) return std::nullopt;
        return std::hypot(found->x - vi_img.vertex.x, found->y - vi_img.vertex.y);
    });
}

/// Distance cap for the binary comparison: a detection farther than this from
/// the true corner is unrelated to it.
constexpr double binary_distance_cap = 5.0;

/// Binary-response comparison grid (grid-aligned features only): both
/// detectors see the image after an extra sigma~1 Gaussian blur. PTAM output
/// is used as-is; the chess response is thresholded at 1.5% of its maximum
/// positive value. Records the distance of the nearest detection to the true
/// corner, capped at binary_distance_cap.
inline ErrorGrid run_binary_sweep(const SweepConfig& cfg) {
    if (cfg.detector != Detector::ptam && cfg.detector != Detector::chess)
        throw std::invalid_argument("run_binary_sweep: detector must be ptam or chess");
    if (cfg.offset_mode != OffsetMode::grid_aligned)
        throw std::invalid_argument("run_binary_sweep: grid_aligned features only");
    const RingGeometry ring = build_ring(5);

    return detail::run_cells(cfg, [&](std::size_t ai, std::size_t vi,
                                      int t) -> std::optional<double> {
        SynthSpec sp;
        sp.angle_deg = cfg.angles[ai];
        sp.noise_variance = cfg.noise_variances[vi];
        sp.offset_mode = OffsetMode::grid_aligned;
        sp.blur = BlurKernel::gauss3;
        sp.seed = cell_seed(cfg.seed, ai, vi, t);
        sp.width = cfg.width;
        sp.height = cfg.height;
        const VertexImage vimg = render_vertex(sp);
        const GrayImage blurred = pre_blur(vimg.image, BlurKernel::gauss5); // sigma^2 ~ 1.04

        double nearest2 = std::numeric_limits<double>::infinity();
        auto consider = [&](int x, int y) {
            const double dx = x - vimg.vertex.x, dy = y - vimg.vertex.y;
            const double d2 = dx * dx + dy * dy;
            if (d2 < nearest2) nearest2 = d2;
        };

        if (cfg.detector == Detector::ptam) {
            PtamParams pp;
            pp.gate = cfg.ptam_gate;
            const BoolImage hits = ptam_detect(blurred, pp);
            for (int y = 0; y < hits.height(); ++y)
                for (int x = 0; x < hits.width(); ++x)
                    if (hits(x, y)) consider(x, y);
        } else {
            const ResponseImage resp = detect(blurred, ring);
            std::int32_t max_resp = 0;
            for (const std::int32_t v : resp.pixels()) max_resp = std::max(max_resp, v);
            if (max_resp > 0) {
                const double threshold = 0.015 * max_resp;
                for (int y = 0; y < resp.height(); ++y)
                    for (int x = 0; x < resp.width(); ++x)
                        if (resp(x, y) > 0 && resp(x, y) >= threshold) consider(x, y);
            }
        }
        return std::min(std::sqrt(nearest2), binary_distance_cap);
    });
}

// ---------------------------------------------------------------------------
// Throughput benchmark.

struct BenchResult {
    Detector detector;
    int loops = 0;
    int width = 0;
    int height = 0;
    double total_s = 0.0;
    double fps = 0.0;
};

/// Times repeated full-frame detection, excluding one warm-up run. The
/// checksum accumulation keeps the optimizer from discarding the work.
inline BenchResult benchmark(Detector det, const GrayImage& frame, int loops, int ptam_gate = 10) {
    if (loops < 1) throw std::invalid_argument("benchmark: loops must be >= 1");
    const RingGeometry ring = build_ring(5);
    HarrisParams hp;
    PtamParams pp;
    pp.gate = ptam_gate;

    volatile std::int64_t sink = 0;
    auto run_once = [&] {
        switch (det) {
        case Detector::chess:
            sink = sink + detect(frame, ring)(frame.width() / 2, frame.height() / 2);
            break;
        case Detector::chess_blur5:
            sink = sink + detect(pre_blur(frame, BlurKernel::gauss5), ring)(frame.width() / 2,
                                                                      frame.height() / 2);
            break;
        case Detector::harris:
            sink = sink + static_cast<std::int64_t>(
                harris_detect(frame, hp)(frame.width() / 2, frame.height() / 2));
            break;
        case Detector::harris_noblur: {
            HarrisParams nb;
            nb.pre_blur = false;
            sink = sink + static_cast<std::int64_t>(
                harris_detect(frame, nb)(frame.width() / 2, frame.height() / 2));
            break;
        }
        case Detector::ptam:
            sink = sink + ptam_detect(frame, pp)(frame.width() / 2, frame.height() / 2);
            break;
        }
    };

    run_once(); // warm-up, not timed
    const auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < loops; ++i) run_once();
    const auto stop = std::chrono::steady_clock::now();

    BenchResult r;
    r.detector = det;
    r.loops = loops;
    r.width = frame.width();
    r.height = frame.height();
    r.total_s = std::chrono::duration<double>(stop - start).count();
    r.fps = loops / r.total_s;
    return r;
}

// ---------------------------------------------------------------------------
// Serialization.

inline std::string detector_name(Detector d) {
    switch (d) {
    case Detector::chess: return "chess";
    case Detector::chess_blur5: return "chess-blur5";
    case Detector::harris: return "harris";
    case Detector::harris_noblur: return "harris-noblur";
    case Detector::ptam: return "ptam";
    }
    return "?";
}

inline std::string grid_to_csv(const ErrorGrid& grid) {
    std::string out = "angle_deg,noise_var,mean_error_px,trials\n";
    char line[128];
    for (std::size_t ai = 0; ai < grid.angles.size(); ++ai) {
        for (std::size_t vi = 0; vi < grid.variances.size(); ++vi) {
            std::snprintf(line, sizeof line, "%.10g,%.10g,%.10g,%d\n", grid.angles[ai],
                          grid.variances[vi], grid.cell(ai, vi), grid.cell_trials(ai, vi));
            out += line;
        }
    }
    return out;
}

inline void write_csv(const ErrorGrid& grid, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_csv: cannot open " + path);
    out << grid_to_csv(grid);
    if (!out) throw std::runtime_error("write_csv: write failed: " + path);
}

} // namespace chess
