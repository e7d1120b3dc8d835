#ifndef MINIDISK_FAMILY_HPP
#define MINIDISK_FAMILY_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "minidisk/grid.hpp"
#include "minidisk/metric.hpp"
#include "minidisk/pde.hpp"

namespace minidisk {

/// One disk of the boundary family: base point p on the sphere, origin marker
/// v in the tangent circle bundle, and the circle offset t.
struct FrameParams {
    Vec3 p;
    Vec3 v;
    double t = 0.0;

    void validate() const;
};

/// The reference-axis gauge for v: normalized projection of e1 (or e2 near
/// alignment) onto the plane orthogonal to p.
Vec3 gauge_v(const Vec3& p);

/// Point of the parallel circle at angle theta:
/// t p + sqrt(1-t^2)(cos(theta) v + sin(theta) p^v).
Vec3 parallel_circle(const FrameParams& fp, double theta);

struct Diagnostics {
    double residual_inf = 0.0;
    int iterations = 0;
    double area = 0.0;
    bool embedded = true;
    double chart_grad_max = 0.0;
};

struct DiskSolution {
    FrameParams params;
    ChartMetric chart;
    GraphFunction w_chart;   // heights in chart units
    GraphFunction heights;   // u = sin(beta) * w_chart, the height along p
    std::string metric_label;
    Diagnostics diag;
    std::vector<NewtonLogRow> newton_log;
    mutable std::shared_ptr<const DiskInterpolant> interp_cache;

    Vec3 immersion(double x, double y) const {
        return chart.ambient(x, y, interpolant().value(x, y));
    }
    Vec3 immersion_node(int i, int j) const {
        const DiskGrid& g = *w_chart.grid;
        const double r = g.radius(i);
        return chart.ambient(r * g.cos_theta(j), r * g.sin_theta(j),
                             w_chart.at(i, j));
    }
    const DiskInterpolant& interpolant() const;
};

struct SolveOptions {
    int nr = 64;
    int ntheta = 128;
    NewtonOptions newton;
    bool check_embedded = true;
    bool check_h1 = false;  // certify sphere mean convexity before solving
    const GraphFunction* warm_start = nullptr;  // chart-unit heights
};

struct SolveOutcome {
    SolveStatus status = SolveStatus::ok;
    std::string message;
    std::optional<DiskSolution> sol;
    bool ok() const { return status == SolveStatus::ok; }
};

/// Solve the graph equation for the disk bounded by the parallel circle of fp.
SolveOutcome solve_disk(const MetricField& field, const FrameParams& fp,
                        const SolveOptions& opts = {});

struct SweepControls {
    double dt0 = 0.02;
    double dt_min = 1e-4;
    SolveOptions solve;
};

struct SweepResult {
    std::vector<DiskSolution> solutions;
    bool stalled = false;
    double last_good_t = 0.0;
    std::string message;
};

/// Continuation in t from t_from toward t_to, warm-starting each solve from
/// the previous heights; the t-step halves on failure down to dt_min.
SweepResult continuation_sweep(const MetricField& field, const Vec3& p,
                               const Vec3& v, double t_from, double t_to,
                               const SweepControls& ctl = {});

struct FoliationReport {
    bool ok = false;
    double min_gap = 0.0;
};

/// Strict monotonicity in t of the heights t + u_t at every node, in the
/// order given; returns the minimum pointwise gap between consecutive disks.
FoliationReport check_foliation(const std::vector<DiskSolution>& sols);

/// Area of the solution surface in the given ambient metric.
double disk_area(const DiskSolution& sol, const MetricField& field);

struct TargetSpec {
    enum class Kind { point_plane, three_points };
    Kind kind = Kind::point_plane;
    Vec3 q = Vec3::Zero();
    Vec3 v1 = Vec3::UnitX(), v2 = Vec3::UnitY();  // spanning the target plane
    Vec3 q1 = Vec3::Zero(), q2 = Vec3::Zero(), q3 = Vec3::Zero();

    static TargetSpec point_plane(const Vec3& q, const Vec3& v1, const Vec3& v2);
    static TargetSpec three_points(const Vec3& q1, const Vec3& q2, const Vec3& q3);
};

enum class TargetStatus { ok, not_reached, no_descent };
std::string to_string(TargetStatus s);

struct TargetOptions {
    int nr = 48;
    int ntheta = 96;
    double tol = 1e-10;
    int max_iter = 60;
    double fd_step = 1e-6;
    NewtonOptions newton;
};

struct TargetResult {
    TargetStatus status = TargetStatus::not_reached;
    double residual = 0.0;
    int iterations = 0;
    std::optional<DiskSolution> sol;
    // chart locations of the target points on the solved disk
    std::vector<Eigen::Vector2d> chart_locations;
    bool ok() const { return status == TargetStatus::ok; }
};

/// Gauss-Newton over (p, t) for a disk through q with tangent plane
/// span{v1, v2}; v is gauge-fixed from p, the on-surface condition is
/// measured in chart coordinates.
TargetResult target_point_plane(const MetricField& field, const Vec3& q,
                                const Vec3& v1, const Vec3& v2,
                                const TargetOptions& opts = {});

/// Gauss-Newton over (p, t) for a disk through three pairwise distinct,
/// non-collinear points.
TargetResult target_three_points(const MetricField& field, const Vec3& q1,
                                 const Vec3& q2, const Vec3& q3,
                                 const TargetOptions& opts = {});

/// The field seen from the ball of radius R rescaled to unit size.
MetricField rescaled_field(const MetricField& field, double R);

struct AsymptoticRow {
    double R = 0.0;
    double area = 0.0;
    double ratio = 0.0;  // area / (pi R^2)
    FrameParams fp;      // parameters in the rescaled unit ball
    TargetStatus status = TargetStatus::not_reached;
};

/// For each radius R: rescale the field and the targets to the unit ball,
/// re-run the targeting, and convert areas back.
std::vector<AsymptoticRow> asymptotic_sweep(const MetricField& field,
                                            const TargetSpec& target,
                                            const std::vector<double>& radii,
                                            const TargetOptions& opts = {});

}  // namespace minidisk

#endif
