#ifndef MINIDISK_PDE_HPP
#define MINIDISK_PDE_HPP

#include <string>
#include <vector>

#include "minidisk/grid.hpp"
#include "minidisk/metric.hpp"

namespace minidisk {

enum class SolveStatus {
    ok,
    no_convergence,
    singular_jacobian,
    chart_breakdown,
    mean_convexity_failed,
};

std::string to_string(SolveStatus s);

struct ChartBreakdown : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Pointwise value of the divergence-form minimal-graph operator for a graph
/// z = w(x,y): the Euclidean divergence of the metric-weighted unit conormal
/// field, evaluated on the graph. Zero exactly at minimal graphs.
double minimal_residual_pointwise(const Mat3& g, const MetricDeriv& dg,
                                  const CartDerivs& d);

/// Operator values at the interior nodes (row-ordered as DiskGrid::unknown
/// minus the pole slot). Throws ChartBreakdown on SPD failure along the graph
/// or when |grad w| exceeds grad_limit.
Eigen::VectorXd residual(const ChartMetric& chart, const GraphFunction& w,
                         double grad_limit = 10.0);

/// Constant-coefficient linearization at the flat graph: the second-order
/// operator with coefficients built from the inverse of G0, applied to h at
/// the interior nodes.
Eigen::VectorXd linearized_constant_operator(const Mat3& g0,
                                             const GraphFunction& h);

/// Coefficients (c_xx, c_xy, c_yy) of that operator.
Eigen::Vector3d linearized_constant_coefficients(const Mat3& g0);

struct NewtonOptions {
    double tol = 1e-10;
    int max_iter = 30;
    int max_halvings = 20;
    double grad_limit = 10.0;
    double fd_step = 1e-6;
};

struct NewtonLogRow {
    int iter;
    double residual_inf;
    double step_scale;
};

struct NewtonResult {
    SolveStatus status = SolveStatus::ok;
    int iterations = 0;
    double residual_inf = 0.0;
    std::vector<NewtonLogRow> log;
    std::string message;
};

/// Damped Newton iteration for the discrete minimal-graph system with zero
/// Dirichlet data. The pole carries the closure equation
/// w(pole) = mean of the first ring; the Jacobian is assembled from central
/// finite differences of the residual with stencil-colored columns.
NewtonResult newton_solve(const ChartMetric& chart, GraphFunction& w,
                          const NewtonOptions& opts = {});

/// Newton with coarse-to-fine grid sequencing: the problem is solved on a
/// cascade of halved grids and each level warm-starts the next, keeping the
/// fine-grid iteration inside its contraction basin. `seed` fills the initial
/// guess on the coarsest level.
NewtonResult cascade_solve(const ChartMetric& chart, GraphFunction& w,
                           const NewtonOptions& opts,
                           const std::function<void(GraphFunction&)>& seed);

/// Coefficient lambda of the leading height profile lambda*(1-t)*(1-r^2) of
/// the solved graphs as t -> 1, from the beta-derivative of the operator at
/// the flat pole configuration.
double initial_height_coefficient(const MetricField& field, const Vec3& p,
                                  const Vec3& v);

/// Area of the graph surface in the ambient metric (composite trapezoid over
/// the polar grid applied to the induced area element).
double graph_area(const ChartMetric& chart, const GraphFunction& w);

struct ConvergenceReport {
    bool exact = false;     // refinement defect below resolution floor
    double order = 0.0;     // Richardson estimate from three grids
    double defect = 0.0;    // |area(N) - area(2N)|
};

/// Observed convergence order of the disk area under grid doubling
/// (N, 2N, 4N), solving the graph equation at each resolution.
ConvergenceReport convergence_order(const MetricField& field, const Vec3& p,
                                    const Vec3& v, double t, int base_nr,
                                    int base_ntheta,
                                    const NewtonOptions& opts = {});

}  // namespace minidisk

#endif
