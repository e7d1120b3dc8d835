#include "minidisk/pde.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

namespace minidisk {

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::ok: return "ok";
        case SolveStatus::no_convergence: return "no convergence";
        case SolveStatus::singular_jacobian: return "singular Jacobian";
        case SolveStatus::chart_breakdown: return "chart breakdown";
        case SolveStatus::mean_convexity_failed: return "mean convexity failed";
    }
    return "?";
}

double minimal_residual_pointwise(const Mat3& g, const MetricDeriv& dg,
                                  const CartDerivs& d) {
    const Mat3 b = g.inverse();
    const double sdet = std::sqrt(g.determinant());
    const Vec3 u(d.wx, d.wy, -1.0);
    const Vec3 bu = b * u;
    const double q = u.dot(bu);

    // derivatives of the gradient vector u along x, y (z-independent)
    const Vec3 du[3] = {Vec3(d.wxx, d.wxy, 0.0), Vec3(d.wxy, d.wyy, 0.0),
                        Vec3::Zero()};

    double div = 0.0;
    const double sq = std::sqrt(q);
    for (int i = 0; i < 3; ++i) {
        const Mat3 dbi = -b * dg[i] * b;
        const double dsi = 0.5 * sdet * (b * dg[i]).trace();
        const double dqi = u.dot(dbi * u) + 2.0 * bu.dot(du[i]);
        const Vec3 dbui = dbi * u + b * du[i];
        div += (dsi / sq - sdet * dqi / (2.0 * q * sq)) * bu[i] +
               (sdet / sq) * dbui[i];
    }
    return div / sdet;
}

namespace {

void check_chart_point(const Mat3& g, const CartDerivs& d, double grad_limit,
                       int i, int j) {
    if (!spd3(g)) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "chart breakdown: SPD failure at node (%d,%d)",
                      i, j);
        throw ChartBreakdown(buf);
    }
    if (d.wx * d.wx + d.wy * d.wy > grad_limit * grad_limit) {
        char buf[96];
        std::snprintf(buf, sizeof buf,
                      "chart breakdown: |grad w| > %g at node (%d,%d)", grad_limit,
                      i, j);
        throw ChartBreakdown(buf);
    }
}

}  // namespace

Eigen::VectorXd residual(const ChartMetric& chart, const GraphFunction& w,
                         double grad_limit) {
    const DiskGrid& g = *w.grid;
    if (!w.values.allFinite())
        throw std::invalid_argument("residual: non-finite graph values");
    Eigen::VectorXd out(g.n_interior());
    for (int i = 1; i < g.nr(); ++i) {
        const double r = g.radius(i);
        for (int j = 0; j < g.ntheta(); ++j) {
            const CartDerivs d = cart_derivs_interior(w, i, j);
            const double x = r * g.cos_theta(j);
            const double y = r * g.sin_theta(j);
            const Mat3 gm = chart.eval(x, y, d.w);
            check_chart_point(gm, d, grad_limit, i, j);
            const MetricDeriv dg = chart.eval_deriv(x, y, d.w);
            out[g.unknown(i, j) - 1] = minimal_residual_pointwise(gm, dg, d);
        }
    }
    return out;
}

Eigen::Vector3d linearized_constant_coefficients(const Mat3& g0) {
    const Mat3 b = g0.inverse();
    const double denom = std::pow(b(2, 2), 1.5);
    const double cxx = (b(0, 0) * b(2, 2) - b(0, 2) * b(0, 2)) / denom;
    const double cyy = (b(1, 1) * b(2, 2) - b(1, 2) * b(1, 2)) / denom;
    const double cxy = 2.0 * (b(0, 1) * b(2, 2) - b(0, 2) * b(1, 2)) / denom;
    return Eigen::Vector3d(cxx, cxy, cyy);
}

Eigen::VectorXd linearized_constant_operator(const Mat3& g0,
                                             const GraphFunction& h) {
    if (!spd3(g0))
        throw std::invalid_argument("linearized_constant_operator: G0 not SPD");
    const Eigen::Vector3d c = linearized_constant_coefficients(g0);
    const DiskGrid& g = *h.grid;
    Eigen::VectorXd out(g.n_interior());
    for (int i = 1; i < g.nr(); ++i)
        for (int j = 0; j < g.ntheta(); ++j) {
            const CartDerivs d = cart_derivs_interior(h, i, j);
            out[g.unknown(i, j) - 1] = c[0] * d.wxx + c[1] * d.wxy + c[2] * d.wyy;
        }
    return out;
}

namespace {

// Unknown layout: slot 0 = pole, slots 1.. = interior nodes.
// System rows: row 0 = pole closure (pole value minus first-ring mean),
// rows 1.. = interior operator values.

void scatter(const Eigen::VectorXd& u, GraphFunction& w) {
    const DiskGrid& g = *w.grid;
    w.values[0] = u[0];
    for (int i = 1; i < g.nr(); ++i)
        for (int j = 0; j < g.ntheta(); ++j)
            w.values[g.node(i, j)] = u[g.unknown(i, j)];
    w.enforce_boundary_zero();
}

Eigen::VectorXd gather(const GraphFunction& w) {
    const DiskGrid& g = *w.grid;
    Eigen::VectorXd u(g.n_unknowns());
    u[0] = w.pole();
    for (int i = 1; i < g.nr(); ++i)
        for (int j = 0; j < g.ntheta(); ++j) u[g.unknown(i, j)] = w.at(i, j);
    return u;
}

Eigen::VectorXd full_system(const ChartMetric& chart, GraphFunction& scratch,
                            const Eigen::VectorXd& u, double grad_limit) {
    const DiskGrid& g = *scratch.grid;
    scatter(u, scratch);
    Eigen::VectorXd f(g.n_unknowns());
    double ring1 = 0.0;
    for (int j = 0; j < g.ntheta(); ++j) ring1 += scratch.at(1, j);
    f[0] = u[0] - ring1 / g.ntheta();
    f.tail(g.n_interior()) = residual(chart, scratch, grad_limit);
    return f;
}

struct JacobianPattern {
    std::vector<std::vector<int>> row_cols;   // per system row
    std::vector<std::vector<int>> col_rows;   // per unknown column
    std::vector<int> color_of;
    int n_colors = 0;
};

JacobianPattern build_pattern(const DiskGrid& g) {
    JacobianPattern pat;
    const int n = g.n_unknowns();
    pat.row_cols.assign(n, {});
    pat.col_rows.assign(n, {});

    auto add = [&](int row, int col) {
        pat.row_cols[row].push_back(col);
        pat.col_rows[col].push_back(row);
    };

    // row 0 is the linear pole closure; its entries are written analytically,
    // so it does not enter the coloring conflicts
    pat.row_cols[0].push_back(0);
    for (int j = 0; j < g.ntheta(); ++j)
        pat.row_cols[0].push_back(g.unknown(1, j));

    for (int i = 1; i < g.nr(); ++i)
        for (int j = 0; j < g.ntheta(); ++j) {
            const int row = g.unknown(i, j);
            if (i == 1) add(row, 0);
            for (int ii = std::max(1, i - 1); ii <= std::min(g.nr() - 1, i + 1);
                 ++ii)
                for (int dj = -1; dj <= 1; ++dj) add(row, g.unknown(ii, j + dj));
        }

    for (auto& v : pat.row_cols) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    for (auto& v : pat.col_rows) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }

    // distance-2 greedy coloring: columns sharing a row get distinct colors
    pat.color_of.assign(n, -1);
    std::vector<int> mark(n, -1);
    int max_color = -1;
    for (int c = 0; c < n; ++c) {
        for (int r : pat.col_rows[c])
            for (int c2 : pat.row_cols[r])
                if (pat.color_of[c2] >= 0) mark[pat.color_of[c2]] = c;
        int col = 0;
        while (col < n && mark[col] == c) ++col;
        pat.color_of[c] = col;
        max_color = std::max(max_color, col);
    }
    pat.n_colors = max_color + 1;
    return pat;
}

}  // namespace

NewtonResult newton_solve(const ChartMetric& chart, GraphFunction& w,
                          const NewtonOptions& opts) {
    const DiskGrid& g = *w.grid;
    if (!w.boundary_is_zero())
        throw std::invalid_argument("newton_solve: nonzero boundary data");
    NewtonResult res;
    GraphFunction scratch(w.grid);
    Eigen::VectorXd u = gather(w);

    Eigen::VectorXd f;
    try {
        f = full_system(chart, scratch, u, opts.grad_limit);
    } catch (const ChartBreakdown& e) {
        res.status = SolveStatus::chart_breakdown;
        res.message = e.what();
        return res;
    }
    double fnorm = f.cwiseAbs().maxCoeff();
    res.log.push_back({0, fnorm, 0.0});

    const JacobianPattern pat = build_pattern(g);
    const int n = g.n_unknowns();
    Eigen::SparseMatrix<double> jac(n, n);
    {
        std::vector<Eigen::Triplet<double>> trips;
        for (int r = 0; r < n; ++r)
            for (int c : pat.row_cols[r]) trips.emplace_back(r, c, 1.0);
        jac.setFromTriplets(trips.begin(), trips.end());
    }
    // pole closure row is linear with fixed coefficients
    jac.coeffRef(0, 0) = 1.0;
    for (int j = 0; j < g.ntheta(); ++j)
        jac.coeffRef(0, g.unknown(1, j)) = -1.0 / g.ntheta();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.analyzePattern(jac);

    for (int it = 1; it <= opts.max_iter; ++it) {
        if (fnorm <= opts.tol) break;

        // finite-difference Jacobian, one residual pair per color
        std::vector<double> steps(n);
        for (int c = 0; c < n; ++c)
            steps[c] = opts.fd_step * std::max(1.0, std::abs(u[c]));
        bool fd_failed = false;
        for (int color = 0; color < pat.n_colors && !fd_failed; ++color) {
            Eigen::VectorXd up = u, um = u;
            for (int c = 0; c < n; ++c)
                if (pat.color_of[c] == color) {
                    up[c] += steps[c];
                    um[c] -= steps[c];
                }
            try {
                const Eigen::VectorXd fp =
                    full_system(chart, scratch, up, opts.grad_limit);
                const Eigen::VectorXd fm =
                    full_system(chart, scratch, um, opts.grad_limit);
                for (int c = 0; c < n; ++c) {
                    if (pat.color_of[c] != color) continue;
                    for (int r : pat.col_rows[c])
                        jac.coeffRef(r, c) = (fp[r] - fm[r]) / (2.0 * steps[c]);
                }
            } catch (const ChartBreakdown& e) {
                res.status = SolveStatus::chart_breakdown;
                res.message = e.what();
                fd_failed = true;
            }
        }
        if (fd_failed) break;

        lu.factorize(jac);
        if (lu.info() != Eigen::Success) {
            res.status = SolveStatus::singular_jacobian;
            res.message = "singular Jacobian in linear solve";
            break;
        }
        const Eigen::VectorXd dir = lu.solve(-f);
        if (!dir.allFinite()) {
            res.status = SolveStatus::singular_jacobian;
            res.message = "singular Jacobian: non-finite Newton step";
            break;
        }

        double scale = 1.0;
        bool accepted = false;
        for (int h = 0; h <= opts.max_halvings; ++h) {
            const Eigen::VectorXd utry = u + scale * dir;
            double ftrynorm = std::numeric_limits<double>::infinity();
            Eigen::VectorXd ftry;
            try {
                ftry = full_system(chart, scratch, utry, opts.grad_limit);
                ftrynorm = ftry.cwiseAbs().maxCoeff();
            } catch (const ChartBreakdown&) {
                // treat as an increase and damp
            }
            if (ftrynorm < fnorm || ftrynorm <= opts.tol) {
                u = utry;
                f = ftry;
                fnorm = ftrynorm;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        res.iterations = it;
        res.log.push_back({it, fnorm, accepted ? scale : 0.0});
        if (!accepted) {
            res.status = SolveStatus::no_convergence;
            res.message = "no convergence: line search failed";
            break;
        }
    }

    res.residual_inf = fnorm;
    if (res.status == SolveStatus::ok && fnorm > opts.tol) {
        res.status = SolveStatus::no_convergence;
        res.message = "no convergence: iteration limit";
    }
    scatter(u, w);
    return res;
}

NewtonResult cascade_solve(const ChartMetric& chart, GraphFunction& w,
                           const NewtonOptions& opts,
                           const std::function<void(GraphFunction&)>& seed) {
    const DiskGrid& g = *w.grid;
    if (g.nr() <= 16 || g.nr() % 2 != 0 || g.ntheta() % 4 != 0 ||
        g.ntheta() / 2 < 16) {
        seed(w);
        return newton_solve(chart, w, opts);
    }
    GraphFunction coarse(build_grid(g.nr() / 2, g.ntheta() / 2));
    NewtonResult cres = cascade_solve(chart, coarse, opts, seed);
    if (cres.status != SolveStatus::ok) return cres;
    const DiskInterpolant itp(coarse);
    w.values[0] = coarse.pole();
    for (int i = 1; i < g.nr(); ++i) {
        const double r = g.radius(i);
        for (int j = 0; j < g.ntheta(); ++j)
            w.at(i, j) = itp.value(r * g.cos_theta(j), r * g.sin_theta(j));
    }
    w.enforce_boundary_zero();
    return newton_solve(chart, w, opts);
}

double initial_height_coefficient(const MetricField& field, const Vec3& p,
                                  const Vec3& v) {
    // beta-derivative of the operator at the flat configuration, one-sided
    // second order from H(0,0) = 0, averaged over a coarse grid
    const double b0 = 1e-2;
    GridPtr grid = build_grid(16, 32);
    GraphFunction zero(grid);
    const ChartMetric c1 = pullback_graph_metric(field, p, v, b0);
    const ChartMetric c2 = pullback_graph_metric(field, p, v, 2.0 * b0);
    const Eigen::VectorXd h1 = residual(c1, zero);
    const Eigen::VectorXd h2 = residual(c2, zero);
    const double dbeta = (4.0 * h1.mean() - h2.mean()) / (2.0 * b0);

    const Mat3 g0 = c1.constant_matrix_at_pole();
    const Eigen::Vector3d c = linearized_constant_coefficients(g0);
    // operator value on (1 - r^2) is the constant -2(c_xx + c_yy); the height
    // scale in t units carries the factor 2 from 1 - cos(beta) = beta^2/2
    return 2.0 * dbeta / (2.0 * (c[0] + c[2]));
}

double graph_area(const ChartMetric& chart, const GraphFunction& w) {
    const DiskGrid& g = *w.grid;
    const NodalFirstDerivs nd = nodal_first_derivs(w);
    const double dr = g.dr(), dt = g.dtheta();
    double area = 0.0;
    for (int i = 1; i <= g.nr(); ++i) {
        const double r = g.radius(i);
        const double wgt = (i == g.nr()) ? 0.5 : 1.0;  // pole ring integrand is 0
        for (int j = 0; j < g.ntheta(); ++j) {
            const int n = g.node(i, j);
            const double c = g.cos_theta(j), s = g.sin_theta(j);
            const double x = r * c, y = r * s;
            const double wv = w.values[n];
            const Vec3 pr = chart.sin_beta() *
                            (c * chart.v() + s * chart.pv() + nd.wr[n] * chart.p());
            const Vec3 pt = chart.sin_beta() *
                            (-y * chart.v() + x * chart.pv() + nd.wt[n] * chart.p());
            const Mat3 gm = chart.base().eval(chart.ambient(x, y, wv));
            const double E = pr.dot(gm * pr);
            const double F = pr.dot(gm * pt);
            const double G2 = pt.dot(gm * pt);
            area += wgt * std::sqrt(std::max(0.0, E * G2 - F * F)) * dr * dt;
        }
    }
    return area;
}

ConvergenceReport convergence_order(const MetricField& field, const Vec3& p,
                                    const Vec3& v, double t, int base_nr,
                                    int base_ntheta, const NewtonOptions& opts) {
    double areas[3];
    const double beta = std::acos(t);
    const ChartMetric chart = pullback_graph_metric(field, p, v, beta);
    const double lam = initial_height_coefficient(field, p, v);
    auto seed = [&](GraphFunction& w) {
        const DiskGrid& g = *w.grid;
        w.values[0] = (1.0 - t) * lam / chart.sin_beta();
        for (int i = 1; i < g.nr(); ++i) {
            const double r = g.radius(i);
            for (int j = 0; j < g.ntheta(); ++j)
                w.at(i, j) = (1.0 - t) * lam * (1.0 - r * r) / chart.sin_beta();
        }
    };
    for (int k = 0; k < 3; ++k) {
        const int f = 1 << k;
        GraphFunction w(build_grid(base_nr * f, base_ntheta * f));
        const NewtonResult nr = cascade_solve(chart, w, opts, seed);
        if (nr.status != SolveStatus::ok)
            throw std::runtime_error("convergence_order: solve failed (" +
                                     to_string(nr.status) + ")");
        areas[k] = graph_area(chart, w);
    }
    ConvergenceReport rep;
    const double d1 = std::abs(areas[0] - areas[1]);
    const double d2 = std::abs(areas[1] - areas[2]);
    rep.defect = d1;
    if (d1 < 1e-12 && d2 < 1e-12) {
        rep.exact = true;
        return rep;
    }
    rep.order = std::log2(d1 / d2);
    return rep;
}

}  // namespace minidisk
