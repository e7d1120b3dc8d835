#include "minidisk/metric.hpp"

#include <cmath>
#include <cstdio>

namespace minidisk {

namespace detail {

double smooth_step(double tau) {
    if (tau <= 0.0) return 0.0;
    if (tau >= 1.0) return 1.0;
    const double e = 1.0 / tau - 1.0 / (1.0 - tau);
    if (e > 40.0) return 0.0;
    if (e < -40.0) return 1.0;
    return 1.0 / (1.0 + std::exp(e));
}

double smooth_step_deriv(double tau) {
    if (tau <= 0.0 || tau >= 1.0) return 0.0;
    const double e = 1.0 / tau - 1.0 / (1.0 - tau);
    if (e > 40.0 || e < -40.0) return 0.0;
    const double s = 1.0 / (1.0 + std::exp(e));
    const double de = -1.0 / (tau * tau) - 1.0 / ((1.0 - tau) * (1.0 - tau));
    return -s * (1.0 - s) * de;
}

double bump_profile(double s) {
    if (s <= 0.9) return 1.0;
    if (s >= 1.0) return 0.0;
    return smooth_step((1.0 - s) / 0.1);
}

double bump_profile_deriv(double s) {
    if (s <= 0.9 || s >= 1.0) return 0.0;
    return -10.0 * smooth_step_deriv((1.0 - s) / 0.1);
}

double half_one_transition(double rho) {
    return smooth_step(2.0 * rho - 1.0);
}

double half_one_transition_deriv(double rho) {
    return 2.0 * smooth_step_deriv(2.0 * rho - 1.0);
}

}  // namespace detail

bool spd3(const Mat3& g) {
    if (!(g(0, 0) > 0.0)) return false;
    const double m2 = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0);
    if (!(m2 > 0.0)) return false;
    return g.determinant() > 0.0;
}

MetricField euclidean() {
    MetricField f;
    f.label = "euclidean";
    f.eval = [](const Vec3&) { return Mat3(Mat3::Identity()); };
    f.eval_deriv = [](const Vec3&) {
        return MetricDeriv{Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};
    };
    return f;
}

MetricField constant_field(const Mat3& g0) {
    MetricField f;
    f.label = "constant";
    f.eval = [g0](const Vec3&) { return g0; };
    f.eval_deriv = [](const Vec3&) {
        return MetricDeriv{Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};
    };
    return f;
}

MetricField conformal_field(std::function<double(const Vec3&)> psi,
                            std::function<Vec3(const Vec3&)> grad_psi,
                            std::string label) {
    MetricField f;
    f.label = std::move(label);
    f.eval = [psi](const Vec3& x) {
        const double c = 1.0 + psi(x);
        return Mat3(c * c * Mat3::Identity());
    };
    f.eval_deriv = [psi, grad_psi](const Vec3& x) {
        const double c = 1.0 + psi(x);
        const Vec3 g = grad_psi(x);
        MetricDeriv d;
        for (int k = 0; k < 3; ++k) d[k] = 2.0 * c * g[k] * Mat3::Identity();
        return d;
    };
    return f;
}

namespace {

// The four bump centers (1+r)(+-e1 +- e2).
std::array<Eigen::Vector2d, 4> bump_centers(double r) {
    const double c = 1.0 + r;
    return {Eigen::Vector2d(c, c), Eigen::Vector2d(c, -c),
            Eigen::Vector2d(-c, c), Eigen::Vector2d(-c, -c)};
}

double bump_psi_value(double r, double eps, const Vec3& x) {
    double psi = 0.0;
    for (const auto& ctr : bump_centers(r)) {
        const double dx = x[0] - ctr[0];
        const double dy = x[1] - ctr[1];
        const double dz = x[2] / eps;
        const double s = std::sqrt(dx * dx + dy * dy + dz * dz);
        if (s < 1.0) psi += eps * eps * detail::bump_profile(s);
    }
    return psi;
}

Vec3 bump_psi_grad(double r, double eps, const Vec3& x) {
    Vec3 g = Vec3::Zero();
    for (const auto& ctr : bump_centers(r)) {
        const double dx = x[0] - ctr[0];
        const double dy = x[1] - ctr[1];
        const double dz = x[2] / eps;
        const double s = std::sqrt(dx * dx + dy * dy + dz * dz);
        if (s <= 0.9 || s >= 1.0) continue;
        const double dphi = eps * eps * detail::bump_profile_deriv(s) / s;
        g[0] += dphi * dx;
        g[1] += dphi * dy;
        g[2] += dphi * dz / eps;
    }
    return g;
}

}  // namespace

MetricField conformal_bump(double r, double eps) {
    if (!(r > 0.0) || !(eps > 0.0))
        throw std::invalid_argument("conformal_bump: need r > 0, eps > 0");
    MetricField f = conformal_field(
        [r, eps](const Vec3& x) { return bump_psi_value(r, eps, x); },
        [r, eps](const Vec3& x) { return bump_psi_grad(r, eps, x); },
        "conformal_bump");
    f.params = {{"r", r}, {"eps", eps}};
    return f;
}

MetricField schwarzschild(double m) {
    if (!(m >= 0.0)) throw std::invalid_argument("schwarzschild: need m >= 0");
    // (1 + m/(2 rho))^4 g0, with rho replaced below 1 by a smooth positive cap.
    auto capped_radius = [](double rho, double* drho) {
        const double T = detail::half_one_transition(rho);
        const double dT = detail::half_one_transition_deriv(rho);
        *drho = T + dT * (rho - 0.5);
        return 0.5 + T * (rho - 0.5);
    };
    MetricField f;
    f.label = "schwarzschild";
    f.params = {{"m", m}};
    f.eval = [m, capped_radius](const Vec3& x) {
        double dr;
        const double rt = capped_radius(x.norm(), &dr);
        const double c = 1.0 + 0.5 * m / rt;
        const double om = c * c * c * c;
        return Mat3(om * Mat3::Identity());
    };
    f.eval_deriv = [m, capped_radius](const Vec3& x) {
        MetricDeriv d{Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};
        const double rho = x.norm();
        if (rho <= 0.5) return d;
        double drt;
        const double rt = capped_radius(rho, &drt);
        const double c = 1.0 + 0.5 * m / rt;
        const double dom = 4.0 * c * c * c * (-0.5 * m / (rt * rt)) * drt;
        for (int k = 0; k < 3; ++k)
            d[k] = dom * (x[k] / rho) * Mat3::Identity();
        return d;
    };
    return f;
}

MetricField conical(double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("conical: need alpha > 0");
    // alpha^2 I + (1-alpha^2) T(rho) xhat xhat^T: the cone dr^2 + alpha^2 r^2 g_{S^2}
    // outside the unit ball, smoothed across the vertex region.
    MetricField f;
    f.label = "conical";
    f.params = {{"alpha", alpha}};
    const double a2 = alpha * alpha;
    f.eval = [a2](const Vec3& x) {
        const double rho = x.norm();
        Mat3 g = a2 * Mat3::Identity();
        if (rho <= 0.5) return g;
        const double T = detail::half_one_transition(rho);
        const Vec3 u = x / rho;
        g += (1.0 - a2) * T * (u * u.transpose());
        return g;
    };
    f.eval_deriv = [a2](const Vec3& x) {
        MetricDeriv d{Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};
        const double rho = x.norm();
        if (rho <= 0.5) return d;
        const double T = detail::half_one_transition(rho);
        const double dT = detail::half_one_transition_deriv(rho);
        const Vec3 u = x / rho;
        const Mat3 uu = u * u.transpose();
        for (int k = 0; k < 3; ++k) {
            Mat3 duu = Mat3::Zero();
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    duu(i, j) = ((i == k ? u[j] : 0.0) + (j == k ? u[i] : 0.0) -
                                 2.0 * u[i] * u[j] * u[k]) /
                                rho;
            d[k] = (1.0 - a2) * (dT * u[k] * uu + T * duu);
        }
        return d;
    };
    return f;
}

MetricField metric_from_name(const std::string& name,
                             const std::map<std::string, double>& params) {
    auto get = [&params](const std::string& key, double dflt) {
        auto it = params.find(key);
        return it == params.end() ? dflt : it->second;
    };
    if (name == "euclidean") return euclidean();
    if (name == "conformal_bump")
        return conformal_bump(get("r", 4.0), get("eps", 0.05));
    if (name == "schwarzschild") return schwarzschild(get("m", 0.1));
    if (name == "conical") return conical(get("alpha", 0.95));
    throw std::invalid_argument("unknown metric: " + name);
}

Mat3 eval_metric(const MetricField& field, const Vec3& x) {
    if (!x.allFinite()) throw std::invalid_argument("eval_metric: x not finite");
    Mat3 g = field.eval(x);
    if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-14 * (1.0 + g.cwiseAbs().maxCoeff()) ||
        !spd3(g)) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "metric degenerate at (%g, %g, %g)", x[0],
                      x[1], x[2]);
        throw MetricError(buf);
    }
    return g;
}

MetricDeriv fd_metric_derivative(const MetricField& field, const Vec3& x,
                                 double step) {
    MetricDeriv d;
    for (int k = 0; k < 3; ++k) {
        Vec3 xp = x, xm = x;
        xp[k] += step;
        xm[k] -= step;
        d[k] = (field.eval(xp) - field.eval(xm)) / (2.0 * step);
    }
    return d;
}

MetricDeriv eval_metric_derivative(const MetricField& field, const Vec3& x) {
    if (!x.allFinite())
        throw std::invalid_argument("eval_metric_derivative: x not finite");
    if (field.eval_deriv) return field.eval_deriv(x);
    return fd_metric_derivative(field, x, 1e-5 * (1.0 + x.norm()));
}

double sphere_mean_curvature(const MetricField& field, double R, int n_samples) {
    if (!(R > 0.0)) throw std::invalid_argument("sphere_mean_curvature: R <= 0");
    if (n_samples < 1) throw std::invalid_argument("sphere_mean_curvature: n_samples < 1");
    // H = div_g(nu) for the outward g-unit normal nu = B x / sqrt(x^T B x),
    // B = G^{-1}; assembled from analytic derivatives of G.
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    double hmin = std::numeric_limits<double>::infinity();
    for (int s = 0; s < n_samples; ++s) {
        const double z = 1.0 - 2.0 * (s + 0.5) / n_samples;
        const double rad = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double ang = 2.0 * M_PI * s / golden;
        const Vec3 x = R * Vec3(rad * std::cos(ang), rad * std::sin(ang), z);

        const Mat3 g = field.eval(x);
        const MetricDeriv dg = eval_metric_derivative(field, x);
        const Mat3 b = g.inverse();
        const Vec3 bx = b * x;
        const double u = x.dot(bx);
        const double su = std::sqrt(u);

        double div = 0.0;
        for (int i = 0; i < 3; ++i) {
            const Mat3 dbi = -b * dg[i] * b;
            const Vec3 dbx = dbi * x + b.col(i);
            const double du = x.dot(dbi * x) + 2.0 * bx[i];
            const double dvi = dbx[i] / su - bx[i] * du / (2.0 * u * su);
            const double dlogsdet = 0.5 * (b * dg[i]).trace();
            div += dvi + dlogsdet * bx[i] / su;
        }
        hmin = std::min(hmin, div);
    }
    return hmin;
}

ChartMetric::ChartMetric(MetricField base, const Vec3& p, const Vec3& v,
                         double beta)
    : base_(std::move(base)), p_(p), v_(v), beta_(beta) {
    if (std::abs(p.norm() - 1.0) > 1e-12 || std::abs(v.norm() - 1.0) > 1e-12 ||
        std::abs(p.dot(v)) > 1e-12)
        throw std::invalid_argument("ChartMetric: frame not orthonormal");
    if (!(beta > 0.0) || !(beta < M_PI))
        throw std::invalid_argument("degenerate chart: beta must lie in (0, pi)");
    pv_ = p_.cross(v_);
    sinb_ = std::sin(beta);
    cosb_ = std::cos(beta);
    conformal_factor_ = 1.0 / (sinb_ * sinb_);
    frame_.col(0) = v_;
    frame_.col(1) = pv_;
    frame_.col(2) = p_;
}

Vec3 ChartMetric::ambient(double x, double y, double z) const {
    return sinb_ * (x * v_ + y * pv_) + (cosb_ + sinb_ * z) * p_;
}

Mat3 ChartMetric::eval(double x, double y, double z) const {
    const Mat3 g = base_.eval(ambient(x, y, z));
    return frame_.transpose() * g * frame_;
}

MetricDeriv ChartMetric::eval_deriv(double x, double y, double z) const {
    const MetricDeriv dg = eval_metric_derivative(base_, ambient(x, y, z));
    // Chart direction k moves the ambient point by sinb * frame.col(k).
    MetricDeriv out;
    for (int k = 0; k < 3; ++k) {
        Mat3 dgk = Mat3::Zero();
        for (int m = 0; m < 3; ++m) dgk += sinb_ * frame_(m, k) * dg[m];
        out[k] = frame_.transpose() * dgk * frame_;
    }
    return out;
}

Mat3 ChartMetric::constant_matrix_at_pole() const {
    const Mat3 g = base_.eval(p_);
    return frame_.transpose() * g * frame_;
}

ChartMetric pullback_graph_metric(const MetricField& field, const Vec3& p,
                                  const Vec3& v, double beta) {
    return ChartMetric(field, p, v, beta);
}

ChartMetric constant_chart(const Mat3& g0) {
    return ChartMetric(constant_field(g0), Vec3(0, 0, 1), Vec3(1, 0, 0),
                       M_PI / 2.0);
}

}  // namespace minidisk
