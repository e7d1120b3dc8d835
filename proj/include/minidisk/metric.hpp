#ifndef MINIDISK_METRIC_HPP
#define MINIDISK_METRIC_HPP

#include <array>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace minidisk {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Rank-3 tensor d[k](i,j) = dG_ij/dx_k.
using MetricDeriv = std::array<Mat3, 3>;

struct MetricError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A smooth field of symmetric positive-definite 3x3 matrices on R^3,
/// together with its first derivatives.
struct MetricField {
    std::function<Mat3(const Vec3&)> eval;
    std::function<MetricDeriv(const Vec3&)> eval_deriv;  // empty -> FD fallback
    std::string label;
    std::map<std::string, double> params;
};

// Built-in fields.
MetricField euclidean();
MetricField conformal_bump(double r, double eps);
MetricField schwarzschild(double m);
MetricField conical(double alpha);
MetricField constant_field(const Mat3& g0);

/// Generic conformal field (1+psi)^2 * I from a scalar and its gradient.
MetricField conformal_field(std::function<double(const Vec3&)> psi,
                            std::function<Vec3(const Vec3&)> grad_psi,
                            std::string label);

/// Build a field by CLI/config name with parameter map (keys r, eps, m, alpha).
MetricField metric_from_name(const std::string& name,
                             const std::map<std::string, double>& params);

/// Evaluate with symmetry/SPD validation; throws MetricError if degenerate.
Mat3 eval_metric(const MetricField& field, const Vec3& x);

/// dG_ij/dx_k; analytic when the field provides it, central differences otherwise.
MetricDeriv eval_metric_derivative(const MetricField& field, const Vec3& x);

/// Central-difference derivative of the evaluator (testing oracle / fallback).
MetricDeriv fd_metric_derivative(const MetricField& field, const Vec3& x, double step);

/// Minimum over sampled points of the mean curvature of the Euclidean sphere
/// of radius R in the given metric (sum of principal curvatures, inward
/// orientation; the Euclidean unit sphere gives 2).
double sphere_mean_curvature(const MetricField& field, double R, int n_samples);

bool spd3(const Mat3& g);

/// The metric seen from the graph chart at frame (p, v, beta): the base field
/// composed with the affine chart map and conjugated by the orthonormal frame
/// (v, p^v, p). The constant conformal factor 1/sin^2(beta) is recorded but
/// not applied; it does not change minimizers.
class ChartMetric {
public:
    ChartMetric(MetricField base, const Vec3& p, const Vec3& v, double beta);

    /// Chart point (x,y,z) -> ambient point.
    Vec3 ambient(double x, double y, double z) const;

    Mat3 eval(double x, double y, double z) const;
    MetricDeriv eval_deriv(double x, double y, double z) const;

    /// Frame-conjugated base metric at the pole point p (the beta -> 0 limit).
    Mat3 constant_matrix_at_pole() const;

    const Vec3& p() const { return p_; }
    const Vec3& v() const { return v_; }
    const Vec3& pv() const { return pv_; }
    double beta() const { return beta_; }
    double t() const { return cosb_; }
    double sin_beta() const { return sinb_; }
    double conformal_factor() const { return conformal_factor_; }
    const MetricField& base() const { return base_; }

private:
    MetricField base_;
    Vec3 p_, v_, pv_;
    double beta_, sinb_, cosb_;
    double conformal_factor_;
    Eigen::Matrix3d frame_;  // columns v, p^v, p
};

ChartMetric pullback_graph_metric(const MetricField& field, const Vec3& p,
                                  const Vec3& v, double beta);

/// Chart over a constant metric at frame (e1,e2,e3), t=0 (test scaffolding).
ChartMetric constant_chart(const Mat3& g0);

namespace detail {
/// C-infinity monotone step: 0 at tau<=0, 1 at tau>=1.
double smooth_step(double tau);
double smooth_step_deriv(double tau);
/// Radial bump profile: 1 on [0,9/10], 0 outside [0,1).
double bump_profile(double s);
double bump_profile_deriv(double s);
/// C-infinity transition that is 0 for rho<=1/2 and 1 for rho>=1.
double half_one_transition(double rho);
double half_one_transition_deriv(double rho);
}  // namespace detail

}  // namespace minidisk

#endif
