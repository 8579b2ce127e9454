#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace chess {

using Vec3 = Eigen::Vector3d;
using PointCloud = std::vector<Vec3>;

struct PlaneFit {
    Vec3 normal;   // unit length, oriented towards +z (ties: +y, then +x)
    Vec3 centroid; // a point on the plane
    double sse = 0.0;
};

/// Cylinder model: axis through c with direction v (deliberately non-unit so
/// all three components vary independently), and s = 1/(r*|v|)^2.
struct CylinderFit {
    Vec3 c = Vec3::Zero();
    Vec3 v = Vec3::UnitZ();
    double s = 1.0;
    double radius = 1.0;   // derived: 1/(sqrt(s)*|v|)
    double residual = 0.0; // cost at the returned parameters
    int iterations = 0;
};

/// Total-least-squares plane through a point set: the fitted plane minimizes
/// perpendicular distances, so its normal is the least-variance principal
/// axis of the centred points.
inline PlaneFit fit_plane_tls(const PointCloud& points) {
    if (points.size() < 3) throw std::invalid_argument("fit_plane_tls: need at least 3 points");

    Vec3 centroid = Vec3::Zero();
    for (const Vec3& p : points) centroid += p;
    centroid /= static_cast<double>(points.size());

    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const Vec3& p : points) {
        const Vec3 d = p - centroid;
        cov += d * d.transpose();
    }

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    const Eigen::Vector3d evals = eig.eigenvalues(); // ascending
    if (evals(1) <= 1e-12 * std::max(1.0, evals(2)))
        throw std::invalid_argument("fit_plane_tls: points are collinear");

    Vec3 normal = eig.eigenvectors().col(0);
    if (normal.z() < 0 || (normal.z() == 0 && (normal.y() < 0 || (normal.y() == 0 && normal.x() < 0))))
        normal = -normal;

    double sse = 0.0;
    for (const Vec3& p : points) {
        const double d = normal.dot(p - centroid);
        sse += d * d;
    }
    return {normal, centroid, sse};
}

/// Cylinder fit cost: sum over points of
/// (s * (X-c)^T (|v|^2 I - v v^T) (X-c) - 1)^2.
/// The quadratic form is |v|^2 times the squared distance from the axis, so
/// each term vanishes exactly on the cylinder surface. Invariant under the
/// gauge (v, s) -> (k v, s/k^2).
inline double cylinder_cost(const Vec3& c, const Vec3& v, double s, const PointCloud& points) {
    const double v2 = v.squaredNorm();
    if (v2 <= 0.0) throw std::invalid_argument("cylinder_cost: axis direction must be non-zero");
    if (s <= 0.0) throw std::invalid_argument("cylinder_cost: s must be positive");
    double cost = 0.0;
    for (const Vec3& p : points) {
        const Vec3 d = p - c;
        const double vd = v.dot(d);
        const double r = s * (v2 * d.squaredNorm() - vd * vd) - 1.0;
        cost += r * r;
    }
    return cost;
}

/// Residual vector of the cylinder cost (cost = residuals.squaredNorm()).
inline Eigen::VectorXd cylinder_residuals(const Vec3& c, const Vec3& v, double s,
                                          const PointCloud& points) {
    const double v2 = v.squaredNorm();
    Eigen::VectorXd r(points.size());
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        const Vec3 d = points[i] - c;
        const double vd = v.dot(d);
        r(i) = s * (v2 * d.squaredNorm() - vd * vd) - 1.0;
    }
    return r;
}

/// Analytic Jacobian of the residuals w.r.t. (c, v, s), n x 7.
inline Eigen::MatrixXd cylinder_jacobian(const Vec3& c, const Vec3& v, double s,
                                         const PointCloud& points) {
    const double v2 = v.squaredNorm();
    Eigen::MatrixXd jac(points.size(), 7);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Vec3 d = points[i] - c;
        const double vd = v.dot(d);
        const Vec3 dc = -2.0 * s * (v2 * d - vd * v);      // d r / d c
        const Vec3 dv = 2.0 * s * (d.squaredNorm() * v - vd * d); // d r / d v
        jac(i, 0) = dc.x();
        jac(i, 1) = dc.y();
        jac(i, 2) = dc.z();
        jac(i, 3) = dv.x();
        jac(i, 4) = dv.y();
        jac(i, 5) = dv.z();
        jac(i, 6) = v2 * d.squaredNorm() - vd * vd; // d r / d s
    }
    return jac;
}

/// Minimizes the cylinder cost over the seven parameters with damped
/// Gauss-Newton (multiplicative damping, x10 on reject, /10 on accept).
/// The gauge freedom (v, s) -> (k v, s/k^2) is removed by rescaling v back to
/// its initial magnitude after every accepted step. Converged when the
/// relative cost decrease drops below 1e-10; throws after 200 iterations.
inline CylinderFit fit_cylinder(const PointCloud& points, const CylinderFit& init) {
    if (points.size() < 7) throw std::invalid_argument("fit_cylinder: need at least 7 points");
    if (init.v.squaredNorm() <= 0.0 || init.s <= 0.0)
        throw std::invalid_argument("fit_cylinder: invalid initial parameters");

    const double v_mag = init.v.norm();
    Vec3 c = init.c;
    Vec3 v = init.v;
    double s = init.s;
    double cost = cylinder_cost(c, v, s, points);
    const double cost_floor = 1e-24 * static_cast<double>(points.size());

    double lambda = 1e-6;
    int iter = 0;
    constexpr int max_iter = 200;
    bool converged = cost <= cost_floor;
    while (!converged && iter < max_iter) {
        ++iter;
        const Eigen::VectorXd r = cylinder_residuals(c, v, s, points);
        const Eigen::MatrixXd jac = cylinder_jacobian(c, v, s, points);
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd jtr = jac.transpose() * r;

        bool accepted = false;
        while (lambda <= 1e12) {
            Eigen::MatrixXd damped = jtj;
            damped.diagonal().array() += lambda;
            const Eigen::VectorXd step = damped.ldlt().solve(-jtr);

            Vec3 c_new = c + step.segment<3>(0);
            Vec3 v_new = v + step.segment<3>(3);
            double s_new = s + step(6);
            if (v_new.squaredNorm() > 0.0 && s_new > 0.0) {
                // Re-fix the gauge before evaluating; cost is unchanged by it.
                const double k = v_mag / v_new.norm();
                v_new *= k;
                s_new /= k * k;
                const double cost_new = cylinder_cost(c_new, v_new, s_new, points);
                if (cost_new < cost) {
                    converged = (cost - cost_new) < 1e-10 * cost || cost_new <= cost_floor;
                    c = c_new;
                    v = v_new;
                    s = s_new;
                    cost = cost_new;
                    lambda = std::max(lambda / 10.0, 1e-12);
                    accepted = true;
                    break;
                }
            }
            lambda *= 10.0;
        }
        // No downhill step at any damping: the gradient is numerically zero.
        if (!accepted) converged = true;
    }

    if (!converged) {
        std::ostringstream msg;
        msg << "fit_cylinder: no convergence after " << max_iter << " iterations; last cost "
            << cost << ", c (" << c.transpose() << "), v (" << v.transpose() << "), s " << s;
        throw std::runtime_error(msg.str());
    }

    CylinderFit fit;
    fit.c = c;
    fit.v = v;
    fit.s = s;
    fit.radius = 1.0 / (std::sqrt(s) * v.norm());
    fit.residual = cost;
    fit.iterations = iter;
    return fit;
}

struct FrameStats {
    double mean_dist = 0.0; // mean Euclidean distance of unit vectors from their mean direction
    double var_dist = 0.0;  // population variance of those distances
    double mean_sse = 0.0;
    double var_sse = 0.0;
};

/// Per-frame consistency statistics of fitted directions (plane normals or
/// cylinder axes, unit length, consistently oriented) and fit SSEs. For the
/// small distances involved the Euclidean distance between unit vectors is
/// numerically the angle in radians.
inline FrameStats frame_stats(const std::vector<Vec3>& unit_vectors,
                              const std::vector<double>& sses) {
    if (unit_vectors.size() < 2)
        throw std::invalid_argument("frame_stats: need at least 2 frames");
    if (sses.size() != unit_vectors.size())
        throw std::invalid_argument("frame_stats: one sse per vector required");

    Vec3 mean = Vec3::Zero();
    for (const Vec3& u : unit_vectors) mean += u;
    mean /= static_cast<double>(unit_vectors.size());
    const double norm = mean.norm();
    if (norm < 1e-12)
        throw std::invalid_argument("frame_stats: mean direction degenerate (antipodal inputs)");
    const Vec3 mean_dir = mean / norm;

    FrameStats st;
    const double n = static_cast<double>(unit_vectors.size());
    double d2 = 0.0;
    for (const Vec3& u : unit_vectors) {
        const double d = (u - mean_dir).norm();
        st.mean_dist += d;
        d2 += d * d;
    }
    st.mean_dist /= n;
    st.var_dist = d2 / n - st.mean_dist * st.mean_dist;

    double s2 = 0.0;
    for (double s : sses) {
        st.mean_sse += s;
        s2 += s * s;
    }
    st.mean_sse /= n;
    st.var_sse = s2 / n - st.mean_sse * st.mean_sse;
    return st;
}

/// Statistics scaled so a baseline method reads 1.0 (zero baseline entries
/// pass through unscaled).
inline FrameStats relative_to(const FrameStats& stats, const FrameStats& baseline) {
    auto rel = [](double v, double b) { return b != 0.0 ? v / b : v; };
    return {rel(stats.mean_dist, baseline.mean_dist), rel(stats.var_dist, baseline.var_dist),
            rel(stats.mean_sse, baseline.mean_sse), rel(stats.var_sse, baseline.var_sse)};
}

// ---------------------------------------------------------------------------
// Plain-text XYZ point cloud I/O: one "x y z" triple per line.

inline PointCloud load_xyz(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_xyz: cannot open " + path);
    PointCloud points;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        Vec3 p;
        if (!(ls >> p.x() >> p.y() >> p.z()))
            throw std::runtime_error("load_xyz: malformed line: " + line);
        points.push_back(p);
    }
    return points;
}

inline void save_xyz(const PointCloud& points, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_xyz: cannot open " + path);
    out.precision(17);
    for (const Vec3& p : points) out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
    if (!out) throw std::runtime_error("save_xyz: write failed: " + path);
}

} // namespace chess
