#include "minidisk/grid.hpp"

#include <cmath>

namespace minidisk {

DiskGrid::DiskGrid(int n_r, int n_theta) : nr_(n_r), nt_(n_theta) {
    if (n_r < 8 || n_theta < 16 || n_theta % 2 != 0)
        throw std::invalid_argument(
            "DiskGrid: need N_r >= 8, N_theta >= 16 even");
    dr_ = 1.0 / nr_;
    dt_ = 2.0 * M_PI / nt_;
    cos_.resize(nt_);
    sin_.resize(nt_);
    for (int j = 0; j < nt_; ++j) {
        cos_[j] = std::cos(j * dt_);
        sin_[j] = std::sin(j * dt_);
    }
}

GridPtr build_grid(int n_r, int n_theta) {
    return std::make_shared<const DiskGrid>(n_r, n_theta);
}

void GraphFunction::enforce_boundary_zero() {
    for (int j = 0; j < grid->ntheta(); ++j) values[grid->node(grid->nr(), j)] = 0.0;
}

bool GraphFunction::boundary_is_zero(double tol) const {
    for (int j = 0; j < grid->ntheta(); ++j)
        if (std::abs(values[grid->node(grid->nr(), j)]) > tol) return false;
    return true;
}

PolarDerivs polar_derivs_interior(const GraphFunction& w, int i, int j) {
    const DiskGrid& g = *w.grid;
    const double dr = g.dr(), dt = g.dtheta();
    const double wc = w.at(i, j);
    const double wim = w.at(i - 1, j), wip = w.at(i + 1, j);
    const double wjm = w.at(i, j - 1), wjp = w.at(i, j + 1);
    const double wpp = w.at(i + 1, j + 1), wpm = w.at(i + 1, j - 1);
    const double wmp = w.at(i - 1, j + 1), wmm = w.at(i - 1, j - 1);
    PolarDerivs d;
    d.w = wc;
    d.wr = (wip - wim) / (2.0 * dr);
    d.wrr = (wip - 2.0 * wc + wim) / (dr * dr);
    d.wt = (wjp - wjm) / (2.0 * dt);
    d.wtt = (wjp - 2.0 * wc + wjm) / (dt * dt);
    d.wrt = (wpp - wpm - wmp + wmm) / (4.0 * dr * dt);
    return d;
}

CartDerivs cart_from_polar(const PolarDerivs& pd, double r, double c, double s) {
    CartDerivs d;
    d.w = pd.w;
    d.wx = c * pd.wr - s * pd.wt / r;
    d.wy = s * pd.wr + c * pd.wt / r;
    const double r2 = r * r;
    d.wxx = c * c * pd.wrr - 2.0 * c * s * pd.wrt / r + s * s * pd.wr / r +
            2.0 * c * s * pd.wt / r2 + s * s * pd.wtt / r2;
    d.wyy = s * s * pd.wrr + 2.0 * c * s * pd.wrt / r + c * c * pd.wr / r -
            2.0 * c * s * pd.wt / r2 + c * c * pd.wtt / r2;
    d.wxy = c * s * pd.wrr + (c * c - s * s) * pd.wrt / r - c * s * pd.wr / r +
            (s * s - c * c) * pd.wt / r2 - c * s * pd.wtt / r2;
    return d;
}

CartDerivs cart_derivs_interior(const GraphFunction& w, int i, int j) {
    const DiskGrid& g = *w.grid;
    return cart_from_polar(polar_derivs_interior(w, i, j), g.radius(i),
                           g.cos_theta(j), g.sin_theta(j));
}

NodalFirstDerivs nodal_first_derivs(const GraphFunction& w) {
    const DiskGrid& g = *w.grid;
    const int nr = g.nr(), nt = g.ntheta();
    const double dr = g.dr(), dt = g.dtheta();
    NodalFirstDerivs d;
    d.wr = Eigen::VectorXd::Zero(g.n_nodes());
    d.wt = Eigen::VectorXd::Zero(g.n_nodes());
    for (int i = 1; i <= nr; ++i) {
        for (int j = 0; j < nt; ++j) {
            const int n = g.node(i, j);
            if (i < nr) {
                d.wr[n] = (w.at(i + 1, j) - w.at(i - 1, j)) / (2.0 * dr);
            } else {
                d.wr[n] = (11.0 * w.at(i, j) - 18.0 * w.at(i - 1, j) +
                           9.0 * w.at(i - 2, j) - 2.0 * w.at(i - 3, j)) /
                          (6.0 * dr);
            }
            d.wt[n] = (w.at(i, j + 1) - w.at(i, j - 1)) / (2.0 * dt);
        }
    }
    return d;
}

Eigen::Vector2d pole_gradient(const GraphFunction& w) {
    const DiskGrid& g = *w.grid;
    const int nt = g.ntheta();
    const double h = g.dr();
    // first angular Fourier mode of ring 1 around the pole value
    double cx = 0.0, cy = 0.0;
    for (int j = 0; j < nt; ++j) {
        const double dv = w.at(1, j) - w.pole();
        cx += dv * g.cos_theta(j);
        cy += dv * g.sin_theta(j);
    }
    return Eigen::Vector2d(2.0 * cx / (nt * h), 2.0 * cy / (nt * h));
}

void DiskInterpolant::Spline::build(const Eigen::VectorXd& f, double step,
                                    int left_kind) {
    // C^2 cubic spline on uniform nodes; solves for slopes s_i.
    // left_kind: 0 clamped s_0 = 0, 1 natural (f''(0) = 0).
    // Right end: not-a-knot (exact on cubics, third-order end derivative).
    n = static_cast<int>(f.size()) - 1;
    h = step;
    Eigen::VectorXd a(n + 1), b(n + 1), c(n + 1), rhs(n + 1);
    if (left_kind == 0) {
        a[0] = 0.0; b[0] = 1.0; c[0] = 0.0; rhs[0] = 0.0;
    } else {
        a[0] = 0.0; b[0] = 2.0; c[0] = 1.0; rhs[0] = 3.0 * (f[1] - f[0]) / h;
    }
    for (int i = 1; i < n; ++i) {
        a[i] = 1.0; b[i] = 4.0; c[i] = 1.0;
        rhs[i] = 3.0 * (f[i + 1] - f[i - 1]) / h;
    }
    // not-a-knot combined with the last interior relation
    a[n] = 4.0; b[n] = 2.0; c[n] = 0.0;
    rhs[n] = (5.0 * f[n] - 4.0 * f[n - 1] - f[n - 2]) / h;

    Eigen::VectorXd s(n + 1), cp(n + 1);
    cp[0] = c[0] / b[0];
    s[0] = rhs[0] / b[0];
    for (int i = 1; i <= n; ++i) {
        const double m = b[i] - a[i] * cp[i - 1];
        cp[i] = c[i] / m;
        s[i] = (rhs[i] - a[i] * s[i - 1]) / m;
    }
    for (int i = n - 1; i >= 0; --i) s[i] -= cp[i] * s[i + 1];

    c0.resize(n); c1.resize(n); c2.resize(n); c3.resize(n);
    for (int i = 0; i < n; ++i) {
        const double df = (f[i + 1] - f[i]) / h;
        c0[i] = f[i];
        c1[i] = s[i];
        c2[i] = (3.0 * df - 2.0 * s[i] - s[i + 1]) / h;
        c3[i] = (s[i] + s[i + 1] - 2.0 * df) / (h * h);
    }
}

double DiskInterpolant::Spline::eval(double r, double* deriv) const {
    int i = static_cast<int>(r / h);
    if (i < 0) i = 0;
    if (i >= n) i = n - 1;
    const double xi = r - i * h;
    if (deriv) *deriv = c1[i] + xi * (2.0 * c2[i] + 3.0 * xi * c3[i]);
    return c0[i] + xi * (c1[i] + xi * (c2[i] + xi * c3[i]));
}

double DiskInterpolant::Spline::eval_over_r(double r) const {
    if (r >= h) return eval(r, nullptr) / r;
    // first interval has c0 = 0 by construction
    return c1[0] + r * (c2[0] + r * c3[0]);
}

DiskInterpolant::DiskInterpolant(const GraphFunction& w) {
    const DiskGrid& g = *w.grid;
    const int nr = g.nr();
    nt_ = g.ntheta();
    kmax_ = nt_ / 2;
    acos_.resize(kmax_ + 1);
    bsin_.resize(kmax_ + 1);
    Eigen::MatrixXd ak(nr + 1, kmax_ + 1), bk(nr + 1, kmax_ + 1);
    ak.setZero();
    bk.setZero();
    ak(0, 0) = w.pole();
    std::vector<double> ct(nt_), st(nt_);
    for (int m = 0; m < nt_; ++m) {
        ct[m] = std::cos(2.0 * M_PI * m / nt_);
        st[m] = std::sin(2.0 * M_PI * m / nt_);
    }
    for (int i = 1; i <= nr; ++i) {
        for (int k = 0; k <= kmax_; ++k) {
            double sa = 0.0, sb = 0.0;
            for (int j = 0; j < nt_; ++j) {
                const int m = (k * j) % nt_;
                const double v = w.at(i, j);
                sa += v * ct[m];
                sb += v * st[m];
            }
            const double scale =
                (k == 0 || k == kmax_) ? 1.0 / nt_ : 2.0 / nt_;
            ak(i, k) = scale * sa;
            bk(i, k) = scale * sb;
        }
    }
    const double h = g.dr();
    for (int k = 0; k <= kmax_; ++k) {
        // parity at the pole: even modes have zero slope, mode 1 zero curvature
        const int left = (k == 1) ? 1 : 0;
        acos_[k].build(ak.col(k), h, left);
        bsin_[k].build(bk.col(k), h, left);
    }
}

double DiskInterpolant::value(double x, double y) const {
    double r = std::sqrt(x * x + y * y);
    if (r > 1.0) r = 1.0;
    const double th = std::atan2(y, x);
    double sum = acos_[0].eval(r, nullptr);
    for (int k = 1; k <= kmax_; ++k) {
        const double a = acos_[k].eval(r, nullptr);
        const double b = bsin_[k].eval(r, nullptr);
        if (a == 0.0 && b == 0.0) continue;
        sum += a * std::cos(k * th) + b * std::sin(k * th);
    }
    return sum;
}

void DiskInterpolant::value_grad(double x, double y, double* w, double* wx,
                                 double* wy) const {
    double r = std::sqrt(x * x + y * y);
    bool clamped = false;
    if (r > 1.0) {
        r = 1.0;
        clamped = true;
    }
    const double th = std::atan2(y, x);
    const double c = std::cos(th), s = std::sin(th);
    double val = 0.0, dvr = 0.0, dvt_over_r = 0.0;
    for (int k = 0; k <= kmax_; ++k) {
        double da, db;
        const double a = acos_[k].eval(r, &da);
        const double b = bsin_[k].eval(r, &db);
        const double ck = std::cos(k * th), sk = std::sin(k * th);
        val += a * ck + b * sk;
        dvr += da * ck + db * sk;
        if (k > 0)
            dvt_over_r +=
                k * (-acos_[k].eval_over_r(r) * sk + bsin_[k].eval_over_r(r) * ck);
    }
    if (w) *w = val;
    if (clamped) dvr = 0.0;  // constant extension outside the closed disk
    if (wx) *wx = c * dvr - s * dvt_over_r;
    if (wy) *wy = s * dvr + c * dvt_over_r;
}

}  // namespace minidisk
