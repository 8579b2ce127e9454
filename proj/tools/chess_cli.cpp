// Command-line front end: synthetic rendering, detection, accuracy sweeps,
// throughput benchmarks and surface fitting.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "chess/baselines.hpp"
#include "chess/detector.hpp"
#include "chess/geomfit.hpp"
#include "chess/image.hpp"
#include "chess/orient.hpp"
#include "chess/ring.hpp"
#include "chess/select.hpp"
#include "chess/sweep.hpp"
#include "chess/synth.hpp"

namespace {

using namespace chess;

/// Accepts either "start:step:stop" or a comma-separated list.
std::vector<double> parse_list(const std::string& text) {
    std::vector<double> values;
    const auto colon1 = text.find(':');
    if (colon1 != std::string::npos) {
        const auto colon2 = text.find(':', colon1 + 1);
        if (colon2 == std::string::npos)
            throw CLI::ValidationError("expected start:step:stop, got '" + text + "'");
        const double start = std::stod(text.substr(0, colon1));
        const double step = std::stod(text.substr(colon1 + 1, colon2 - colon1 - 1));
        const double stop = std::stod(text.substr(colon2 + 1));
        if (step <= 0) throw CLI::ValidationError("range step must be positive");
        return arange(start, step, stop);
    }
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t next = text.find(',', pos);
        if (next == std::string::npos) next = text.size();
        values.push_back(std::stod(text.substr(pos, next - pos)));
        pos = next + 1;
    }
    if (values.empty()) throw CLI::ValidationError("empty list");
    return values;
}

Detector parse_detector(const std::string& name) {
    if (name == "chess") return Detector::chess;
    if (name == "chess-blur5") return Detector::chess_blur5;
    if (name == "harris") return Detector::harris;
    if (name == "harris-noblur") return Detector::harris_noblur;
    if (name == "ptam") return Detector::ptam;
    throw CLI::ValidationError("unknown detector '" + name + "'");
}

OffsetMode parse_offset_mode(const std::string& name) {
    if (name == "grid-aligned") return OffsetMode::grid_aligned;
    if (name == "half-pixel") return OffsetMode::half_pixel;
    throw CLI::ValidationError("unknown offset mode '" + name + "'");
}

std::optional<BlurKernel> parse_blur(const std::string& name) {
    if (name == "none") return std::nullopt;
    if (name == "gauss3") return BlurKernel::gauss3;
    if (name == "gauss5") return BlurKernel::gauss5;
    throw CLI::ValidationError("unknown blur kernel '" + name + "'");
}

void write_features_csv(std::ostream& out, const std::vector<Feature>& features,
                        double strength_scale) {
    out << "x,y,strength,bin\n";
    char line[160];
    for (const Feature& f : features) {
        if (f.orientation_bin)
            std::snprintf(line, sizeof line, "%.6f,%.6f,%.6g,%d\n", f.x, f.y,
                          f.strength / strength_scale, *f.orientation_bin);
        else
            std::snprintf(line, sizeof line, "%.6f,%.6f,%.6g,\n", f.x, f.y,
                          f.strength / strength_scale);
        out << line;
    }
}

void emit_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << content;
}

struct SweepCli {
    std::string detector = "chess";
    std::string angles = "0:2.5:90";
    std::string variances = "0:0.5:10";
    std::string offset_mode = "grid-aligned";
    std::string localization = "integer-argmax";
    int trials = 5;
    std::uint64_t seed = 0;
    int gate = 10;
    int threads = 1;
    int width = 640;
    int height = 480;
    std::string out;
};

void add_sweep_options(CLI::App* cmd, SweepCli& opt, bool binary) {
    cmd->add_option("--detector", opt.detector,
                    binary ? "ptam or chess (thresholded at 1.5% of max response)"
                           : "chess, chess-blur5, harris or harris-noblur")
        ->capture_default_str();
    cmd->add_option("--angles", opt.angles, "rotation angles, start:step:stop or comma list")
        ->capture_default_str();
    cmd->add_option("--noise-variances", opt.variances,
                    "noise variances, start:step:stop or comma list")
        ->capture_default_str();
    if (!binary) {
        cmd->add_option("--offset-mode", opt.offset_mode, "grid-aligned or half-pixel")
            ->capture_default_str();
        cmd->add_option("--localization", opt.localization, "integer-argmax or com5x5")
            ->capture_default_str();
    }
    cmd->add_option("--trials-per-cell", opt.trials)->capture_default_str();
    cmd->add_option("--seed", opt.seed)->capture_default_str();
    cmd->add_option("--gate", opt.gate, "PTAM gate")->capture_default_str();
    cmd->add_option("--threads", opt.threads)->capture_default_str();
    cmd->add_option("--width", opt.width)->capture_default_str();
    cmd->add_option("--height", opt.height)->capture_default_str();
    cmd->add_option("--out", opt.out, "CSV output path (default stdout)");
}

SweepConfig to_config(const SweepCli& opt) {
    SweepConfig cfg;
    cfg.detector = parse_detector(opt.detector);
    cfg.angles = parse_list(opt.angles);
    cfg.noise_variances = parse_list(opt.variances);
    cfg.offset_mode = parse_offset_mode(opt.offset_mode);
    cfg.localization = opt.localization == "com5x5" ? Localization::com5x5
                                                    : Localization::integer_argmax;
    if (opt.localization != "com5x5" && opt.localization != "integer-argmax")
        throw CLI::ValidationError("unknown localization '" + opt.localization + "'");
    cfg.trials_per_cell = opt.trials;
    cfg.seed = opt.seed;
    cfg.ptam_gate = opt.gate;
    cfg.threads = opt.threads;
    cfg.width = opt.width;
    cfg.height = opt.height;
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"chess-board vertex detection toolkit"};
    app.require_subcommand(1);

    // --- render ---
    auto* render = app.add_subcommand("render", "render a synthetic vertex or board image");
    struct {
        std::string out;
        double angle = 0.0;
        std::string offset_mode = "grid-aligned";
        int dark = 64, light = 191;
        double noise_variance = 0.0;
        std::string blur = "gauss3";
        std::uint64_t seed = 0;
        int width = 640, height = 480;
        int rows = 0, cols = 0, square = 40;
    } ropt;
    render->add_option("--out", ropt.out, "output PGM path")->required();
    render->add_option("--angle", ropt.angle)->capture_default_str();
    render->add_option("--offset-mode", ropt.offset_mode)->capture_default_str();
    render->add_option("--dark", ropt.dark)->capture_default_str();
    render->add_option("--light", ropt.light)->capture_default_str();
    render->add_option("--noise-variance", ropt.noise_variance)->capture_default_str();
    render->add_option("--blur", ropt.blur, "none, gauss3 or gauss5")->capture_default_str();
    render->add_option("--seed", ropt.seed)->capture_default_str();
    render->add_option("--width", ropt.width)->capture_default_str();
    render->add_option("--height", ropt.height)->capture_default_str();
    render->add_option("--rows", ropt.rows, "board rows (with --cols renders a board)");
    render->add_option("--cols", ropt.cols, "board columns");
    render->add_option("--square", ropt.square, "board square size in px")->capture_default_str();

    // --- detect ---
    auto* det = app.add_subcommand("detect", "detect features in a PGM image, CSV to stdout");
    struct {
        std::string in, out;
        std::string detector = "chess";
        int gate = 10;
        int radius = 5;
        SelectConfig select;
    } dopt;
    det->add_option("--in", dopt.in, "input PGM path")->required();
    det->add_option("--out", dopt.out, "features CSV path (default stdout)");
    det->add_option("--detector", dopt.detector)->capture_default_str();
    det->add_option("--gate", dopt.gate, "PTAM gate")->capture_default_str();
    det->add_option("--radius", dopt.radius, "sampling ring radius, 5 or 10")
        ->capture_default_str();
    det->add_option("--nms-window", dopt.select.nms_window)->capture_default_str();
    det->add_option("--neighbourhood-area", dopt.select.neighbourhood_area)->capture_default_str();
    det->add_option("--neighbourhood-proportion", dopt.select.neighbourhood_proportion)
        ->capture_default_str();
    det->add_flag("!--no-connectivity", dopt.select.require_connectivity,
                  "skip the connectivity filter");

    // --- sweep / binary-sweep ---
    auto* sweep = app.add_subcommand("sweep", "rotation x noise localization-error grid");
    SweepCli sopt;
    add_sweep_options(sweep, sopt, false);
    auto* bsweep =
        app.add_subcommand("binary-sweep", "rotation x noise nearest-detection distance grid");
    SweepCli bopt;
    add_sweep_options(bsweep, bopt, true);

    // --- bench ---
    auto* bench = app.add_subcommand("bench", "full-frame detection throughput");
    struct {
        std::string detector = "chess";
        int loops = 500;
        int gate = 10;
        int width = 640, height = 480;
        std::uint64_t seed = 0;
    } benopt;
    bench->add_option("--detector", benopt.detector)->capture_default_str();
    bench->add_option("--loops", benopt.loops)->capture_default_str();
    bench->add_option("--gate", benopt.gate)->capture_default_str();
    bench->add_option("--width", benopt.width)->capture_default_str();
    bench->add_option("--height", benopt.height)->capture_default_str();
    bench->add_option("--seed", benopt.seed)->capture_default_str();

    // --- fit-plane / fit-cylinder ---
    auto* fplane = app.add_subcommand("fit-plane", "total-least-squares plane fit of an XYZ file");
    std::string plane_in;
    fplane->add_option("--in", plane_in, "XYZ point file")->required();

    auto* fcyl = app.add_subcommand("fit-cylinder", "seven-parameter cylinder fit of an XYZ file");
    struct {
        std::string in;
        std::vector<double> init_c, init_v;
        double init_r = 0.0;
    } copt;
    fcyl->add_option("--in", copt.in, "XYZ point file")->required();
    fcyl->add_option("--init-c", copt.init_c, "initial axis point (3 values)")->expected(3);
    fcyl->add_option("--init-v", copt.init_v, "initial axis direction (3 values)")->expected(3);
    fcyl->add_option("--init-r", copt.init_r, "initial radius (default: estimated)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*render) {
            SynthSpec spec;
            spec.angle_deg = ropt.angle;
            spec.offset_mode = parse_offset_mode(ropt.offset_mode);
            spec.dark = ropt.dark;
            spec.light = ropt.light;
            spec.noise_variance = ropt.noise_variance;
            spec.blur = parse_blur(ropt.blur);
            spec.seed = ropt.seed;
            spec.width = ropt.width;
            spec.height = ropt.height;
            if (ropt.rows > 0 || ropt.cols > 0) {
                const BoardImage board = render_board(ropt.rows, ropt.cols, ropt.square, spec);
                save_pgm(board.image, ropt.out);
                std::cout << "vertices=" << board.vertices.size() << "\n";
                for (const Point2& v : board.vertices)
                    std::printf("%.6f,%.6f\n", v.x, v.y);
            } else {
                const VertexImage vi = render_vertex(spec);
                save_pgm(vi.image, ropt.out);
                std::printf("vertex_x=%.6f\nvertex_y=%.6f\n", vi.vertex.x, vi.vertex.y);
            }
        } else if (*det) {
            const GrayImage img = load_pgm(dopt.in);
            const Detector d = parse_detector(dopt.detector);
            std::ostringstream csv;
            if (d == Detector::ptam) {
                PtamParams pp;
                pp.gate = dopt.gate;
                const BoolImage hits = ptam_detect(pre_blur(img, BlurKernel::gauss5), pp);
                csv << "x,y,strength,bin\n";
                for (int y = 0; y < hits.height(); ++y)
                    for (int x = 0; x < hits.width(); ++x)
                        if (hits(x, y)) csv << x << "," << y << ",1,\n";
            } else if (d == Detector::harris || d == Detector::harris_noblur) {
                HarrisParams hp;
                hp.pre_blur = d == Detector::harris;
                std::vector<Feature> features = select_features(harris_detect(img, hp), dopt.select);
                write_features_csv(csv, features, 1.0);
            } else {
                const RingGeometry ring = build_ring(dopt.radius);
                const GrayImage& src =
                    d == Detector::chess_blur5 ? pre_blur(img, BlurKernel::gauss5) : img;
                std::vector<Feature> features = select_features(detect(src, ring), dopt.select);
                label_features(src, ring, features);
                write_features_csv(csv, features, static_cast<double>(response_scale));
            }
            emit_output(dopt.out, csv.str());
        } else if (*sweep) {
            const ErrorGrid grid = run_sweep(to_config(sopt));
            emit_output(sopt.out, grid_to_csv(grid));
        } else if (*bsweep) {
            const ErrorGrid grid = run_binary_sweep(to_config(bopt));
            emit_output(bopt.out, grid_to_csv(grid));
        } else if (*bench) {
            SynthSpec spec;
            spec.noise_variance = 4.0;
            spec.blur = BlurKernel::gauss3;
            spec.seed = benopt.seed;
            spec.width = benopt.width;
            spec.height = benopt.height;
            const BoardImage frame = render_board(8, 10, std::min(benopt.width, benopt.height) / 10,
                                                  spec);
            const BenchResult r =
                benchmark(parse_detector(benopt.detector), frame.image, benopt.loops, benopt.gate);
            std::printf("%s: %d loops over %dx%d frame in %.3f s (%.1f fps)\n",
                        detector_name(r.detector).c_str(), r.loops, r.width, r.height, r.total_s,
                        r.fps);
            std::printf("detector=%s\nloops=%d\nwidth=%d\nheight=%d\ntotal_s=%.6f\nfps=%.2f\n",
                        detector_name(r.detector).c_str(), r.loops, r.width, r.height, r.total_s,
                        r.fps);
        } else if (*fplane) {
            const PlaneFit fit = fit_plane_tls(load_xyz(plane_in));
            std::printf("normal=%.12g %.12g %.12g\ncentroid=%.12g %.12g %.12g\nsse=%.12g\n",
                        fit.normal.x(), fit.normal.y(), fit.normal.z(), fit.centroid.x(),
                        fit.centroid.y(), fit.centroid.z(), fit.sse);
        } else if (*fcyl) {
            const PointCloud points = load_xyz(copt.in);
            std::optional<CylinderFit> fit;
            if (!copt.init_c.empty() && !copt.init_v.empty() && copt.init_r > 0.0) {
                CylinderFit init;
                init.c = Vec3(copt.init_c[0], copt.init_c[1], copt.init_c[2]);
                init.v = Vec3(copt.init_v[0], copt.init_v[1], copt.init_v[2]);
                init.s = 1.0 / std::pow(copt.init_r * init.v.norm(), 2);
                fit = fit_cylinder(points, init);
            } else {
                // No principal direction reliably identifies the axis (a
                // short wide section has more transverse than axial spread),
                // so fit from all three and keep the lowest-cost result.
                if (points.size() < 7)
                    throw std::runtime_error("fit-cylinder: need at least 7 points");
                Vec3 centroid = Vec3::Zero();
                for (const Vec3& p : points) centroid += p;
                centroid /= static_cast<double>(points.size());
                Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
                for (const Vec3& p : points) {
                    const Vec3 d = p - centroid;
                    cov += d * d.transpose();
                }
                const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
                for (int col = 0; col < 3; ++col) {
                    const Vec3 axis = eig.eigenvectors().col(col);
                    double r0 = 0.0;
                    for (const Vec3& p : points) {
                        const Vec3 d = p - centroid;
                        r0 += (d - axis * axis.dot(d)).norm();
                    }
                    r0 /= static_cast<double>(points.size());
                    if (r0 <= 0.0) continue;
                    CylinderFit init;
                    init.c = centroid;
                    init.v = axis;
                    init.s = 1.0 / (r0 * r0);
                    try {
                        const CylinderFit candidate = fit_cylinder(points, init);
                        if (!fit || candidate.residual < fit->residual) fit = candidate;
                    } catch (const std::runtime_error&) {
                        // non-convergence from this axis guess; try the next
                    }
                }
                if (!fit) throw std::runtime_error("fit-cylinder: no axis guess converged");
            }
            std::printf("c=%.12g %.12g %.12g\nv=%.12g %.12g %.12g\ns=%.12g\nradius=%.12g\n"
                        "residual=%.12g\niterations=%d\n",
                        fit->c.x(), fit->c.y(), fit->c.z(), fit->v.x(), fit->v.y(), fit->v.z(),
                        fit->s, fit->radius, fit->residual, fit->iterations);
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
