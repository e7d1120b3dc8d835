#include "minidisk/counterexample.hpp"

#include <cmath>

namespace minidisk {

void CounterexampleParams::validate() const {
    if (!(r > 0.0)) throw std::invalid_argument("counterexample: need r > 0");
    if (!(eps > 0.0 && eps <= 0.2))
        throw std::invalid_argument("counterexample: need eps in (0, 0.2]");
    if (R != 0.0 && R < (std::sqrt(2.0) + 1.0) * (1.0 + r) - 1e-12)
        throw std::invalid_argument(
            "counterexample: need R >= (sqrt(2)+1)(1+r)");
}

double CounterexampleParams::domain_radius() const {
    return R == 0.0 ? (std::sqrt(2.0) + 1.0) * (1.0 + r) : R;
}

double bump_psi(const CounterexampleParams& params, const Vec3& x) {
    const double c = 1.0 + params.r;
    const double e = params.eps;
    double psi = 0.0;
    for (double sx : {1.0, -1.0})
        for (double sy : {1.0, -1.0}) {
            const double dx = x[0] - sx * c;
            const double dy = x[1] - sy * c;
            const double dz = x[2] / e;
            const double s = std::sqrt(dx * dx + dy * dy + dz * dz);
            if (s < 1.0) psi += e * e * detail::bump_profile(s);
        }
    return psi;
}

Vec3 bump_psi_gradient(const CounterexampleParams& params, const Vec3& x) {
    const double c = 1.0 + params.r;
    const double e = params.eps;
    Vec3 g = Vec3::Zero();
    for (double sx : {1.0, -1.0})
        for (double sy : {1.0, -1.0}) {
            const double dx = x[0] - sx * c;
            const double dy = x[1] - sy * c;
            const double dz = x[2] / e;
            const double s = std::sqrt(dx * dx + dy * dy + dz * dz);
            if (s <= 0.9 || s >= 1.0) continue;
            const double d = e * e * detail::bump_profile_deriv(s) / s;
            g[0] += d * dx;
            g[1] += d * dy;
            g[2] += d * dz / e;
        }
    return g;
}

namespace {

// composite Gauss-Legendre (16 point) on [a, b] split into n panels
template <typename F>
double gauss_legendre(F f, double a, double b, int panels) {
    static const double gx[8] = {
        0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
        0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
        0.9445750230732326, 0.9894009349916499};
    static const double gw[8] = {
        0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
        0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
        0.0622535239386479, 0.0271524594117541};
    double total = 0.0;
    const double hp = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * hp;
        for (int k = 0; k < 8; ++k) {
            total += gw[k] * hp / 2.0 *
                     (f(mid + 0.5 * hp * gx[k]) + f(mid - 0.5 * hp * gx[k]));
        }
    }
    return total;
}

}  // namespace

QuarterDiskArea quarter_disk_area(const CounterexampleParams& params) {
    params.validate();
    const double e = params.eps;
    const double Rd = params.domain_radius();
    // only the bump footprint contributes: radially symmetric about its center
    auto integrand = [e](double s) {
        const double phi = detail::bump_profile(s);
        const double w = 1.0 + e * e * phi;
        return (w * w - 1.0) * s;
    };
    const double core = (2.0 * e * e + e * e * e * e) * 0.5 * 0.81;  // phi = 1
    const double annulus = gauss_legendre(integrand, 0.9, 1.0, 8);
    QuarterDiskArea out;
    out.excess = 2.0 * M_PI * (core + annulus);
    out.total = 0.25 * M_PI * Rd * Rd + out.excess;
    return out;
}

double quarter_disk_excess_grid(const CounterexampleParams& params, int n) {
    params.validate();
    const double c = 1.0 + params.r;
    // midpoint rule on the footprint box of the first-quadrant bump
    const double h = 2.0 / n;
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double x = c - 1.0 + (i + 0.5) * h;
            const double y = c - 1.0 + (j + 0.5) * h;
            const double psi = bump_psi(params, Vec3(x, y, 0.0));
            sum += ((1.0 + psi) * (1.0 + psi) - 1.0) * h * h;
        }
    return sum;
}

double competitor_height(const CounterexampleParams& params, double rho) {
    const double r = params.r, e = params.eps;
    if (rho <= 1.0) return e;
    if (rho >= 1.0 + r) return 0.0;
    return -e * std::log(rho / (1.0 + r)) / std::log(1.0 + r);
}

double competitor_excess(const CounterexampleParams& params) {
    params.validate();
    const double r = params.r, e = params.eps;
    const double slope = e / std::log(1.0 + r);
    auto integrand = [slope](double rho) {
        const double w = slope / rho;
        // sqrt(1 + w^2) - 1 without cancellation
        const double ex = w * w / (std::sqrt(1.0 + w * w) + 1.0);
        return ex * rho;
    };
    return 2.0 * M_PI * gauss_legendre(integrand, 1.0, 1.0 + r, 16);
}

double competitor_area(const CounterexampleParams& params) {
    const double Rd = params.domain_radius();
    return 0.25 * M_PI * Rd * Rd + competitor_excess(params);
}

double crossover_threshold() {
    // root of ln(1+r) = (10/9)^2 by bisection
    const double target = 100.0 / 81.0;
    double lo = 1.0, hi = 10.0;
    for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        (std::log(1.0 + mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

namespace {

struct CellGeometry {
    double rc, thc, dr, dth;
};

// energy and gradient of one polar cell (midpoint quadrature, bilinear corner
// coupling); corners ordered (i,j), (i+1,j), (i,j+1), (i+1,j+1)
double cell_energy(const CounterexampleParams& params, const CellGeometry& c,
                   const double u[4], double grad[4]) {
    const double ubar = 0.25 * (u[0] + u[1] + u[2] + u[3]);
    const double ur = ((u[1] + u[3]) - (u[0] + u[2])) / (2.0 * c.dr);
    const double ut = ((u[2] + u[3]) - (u[0] + u[1])) / (2.0 * c.dth);
    const double ut_r = ut / c.rc;
    const double grad2 = ur * ur + ut_r * ut_r;
    const double root = std::sqrt(1.0 + grad2);
    const double x = c.rc * std::cos(c.thc), y = c.rc * std::sin(c.thc);
    const Vec3 pos(x, y, ubar);
    const double psi = bump_psi(params, pos);
    const double w = (1.0 + psi) * (1.0 + psi);
    const double darea = c.rc * c.dr * c.dth;
    if (grad) {
        const double psi_z = bump_psi_gradient(params, pos)[2];
        const double de_dubar = 2.0 * (1.0 + psi) * psi_z * root * darea;
        const double de_dur = w * (ur / root) * darea;
        const double de_dut = w * (ut_r / (root * c.rc)) * darea;
        grad[0] += 0.25 * de_dubar - de_dur / (2.0 * c.dr) - de_dut / (2.0 * c.dth);
        grad[1] += 0.25 * de_dubar + de_dur / (2.0 * c.dr) - de_dut / (2.0 * c.dth);
        grad[2] += 0.25 * de_dubar - de_dur / (2.0 * c.dr) + de_dut / (2.0 * c.dth);
        grad[3] += 0.25 * de_dubar + de_dur / (2.0 * c.dr) + de_dut / (2.0 * c.dth);
    }
    return w * root * darea;
}

double energy_and_gradient(const CounterexampleParams& params,
                           const QuarterGrid& g, const Eigen::VectorXd& u,
                           Eigen::VectorXd* grad) {
    if (grad) grad->setZero();
    const double dr = g.R / g.nr;
    const double dth = 0.5 * M_PI / g.ntheta;
    double total = 0.0;
    for (int i = 0; i < g.nr; ++i)
        for (int j = 0; j < g.ntheta; ++j) {
            const CellGeometry c{(i + 0.5) * dr, (j + 0.5) * dth, dr, dth};
            const int idx[4] = {g.node(i, j), g.node(i + 1, j), g.node(i, j + 1),
                                g.node(i + 1, j + 1)};
            const double uc[4] = {u[idx[0]], u[idx[1]], u[idx[2]], u[idx[3]]};
            double gc[4] = {0, 0, 0, 0};
            total += cell_energy(params, c, uc, grad ? gc : nullptr);
            if (grad)
                for (int k = 0; k < 4; ++k) (*grad)[idx[k]] += gc[k];
        }
    return total;
}

void zero_boundary(const QuarterGrid& g, Eigen::VectorXd& v) {
    for (int i = 0; i <= g.nr; ++i)
        for (int j = 0; j <= g.ntheta; ++j)
            if (g.is_boundary(i, j)) v[g.node(i, j)] = 0.0;
}

}  // namespace

double plateau_energy(const CounterexampleParams& params, const QuarterGrid& grid,
                      const Eigen::VectorXd& u) {
    return energy_and_gradient(params, grid, u, nullptr);
}

Eigen::VectorXd sample_competitor(const CounterexampleParams& params,
                                  const QuarterGrid& g) {
    const double c = 1.0 + params.r;
    Eigen::VectorXd u(g.n_nodes());
    for (int i = 0; i <= g.nr; ++i)
        for (int j = 0; j <= g.ntheta; ++j) {
            const double x = g.radius(i) * std::cos(g.theta(j));
            const double y = g.radius(i) * std::sin(g.theta(j));
            const double rho = std::hypot(x - c, y - c);
            u[g.node(i, j)] = competitor_height(params, rho);
        }
    zero_boundary(g, u);
    return u;
}

PlateauResult plateau_graph_minimize(const CounterexampleParams& params,
                                     const QuarterGrid& grid,
                                     Eigen::VectorXd u0, int max_iter,
                                     double tol) {
    params.validate();
    QuarterGrid g = grid;
    if (g.R == 0.0) g.R = params.domain_radius();
    if (u0.size() != g.n_nodes())
        throw std::invalid_argument("plateau_graph_minimize: bad initial size");
    if (u0.minCoeff() < -1e-15 || u0.maxCoeff() > params.eps + 1e-15)
        throw std::invalid_argument(
            "plateau_graph_minimize: initial heights must lie in [0, eps]");
    PlateauResult res;
    res.u = std::move(u0);
    zero_boundary(g, res.u);

    Eigen::VectorXd grad(g.n_nodes());
    double energy = energy_and_gradient(params, g, res.u, &grad);
    zero_boundary(g, grad);
    double step = 1.0;
    for (int it = 0; it < max_iter; ++it) {
        const double gnorm = grad.norm();
        if (gnorm <= tol) {
            res.converged = true;
            break;
        }
        bool accepted = false;
        for (int bt = 0; bt < 40; ++bt) {
            Eigen::VectorXd utry = res.u - step * grad;
            const double etry = energy_and_gradient(params, g, utry, nullptr);
            if (etry < energy - 1e-4 * step * gnorm * gnorm) {
                res.u = std::move(utry);
                if (etry > energy) res.monotone = false;
                energy = etry;
                accepted = true;
                step *= 1.5;
                break;
            }
            step *= 0.5;
        }
        ++res.iterations;
        if (!accepted) {
            res.converged = grad.norm() <= 10.0 * tol;
            break;
        }
        energy = energy_and_gradient(params, g, res.u, &grad);
        zero_boundary(g, grad);
    }
    res.area = energy;
    res.excess = energy - 0.25 * M_PI * g.R * g.R;
    return res;
}

CounterexampleReport verify_counterexample(const CounterexampleParams& params) {
    params.validate();
    CounterexampleReport rep;
    rep.params = params;
    rep.params.R = params.domain_radius();

    const MetricField field = conformal_bump(params.r, params.eps);
    rep.h1_min_mean_curv = std::numeric_limits<double>::infinity();
    for (double R : {0.5, 1.0, 2.0, 5.0, 10.0, 15.0})
        rep.h1_min_mean_curv =
            std::min(rep.h1_min_mean_curv, sphere_mean_curvature(field, R, 800));

    rep.excess_flat = quarter_disk_area(params).excess;
    rep.excess_competitor = competitor_excess(params);
    rep.above_crossover = params.r > crossover_threshold();

    QuarterGrid grid;
    grid.R = rep.params.R;
    const PlateauResult pl = plateau_graph_minimize(
        params, grid, sample_competitor(params, grid), 200, 1e-8);
    rep.plateau_area_excess = pl.excess;

    if (!rep.above_crossover) {
        rep.verdict = "inconclusive: r below the crossover threshold";
        return rep;
    }
    const bool h1 = rep.h1_min_mean_curv > 0.0;
    const bool comp_lt_flat = rep.excess_competitor < rep.excess_flat;
    const bool plateau_lt_flat = rep.plateau_area_excess < rep.excess_flat;
    rep.certified = h1 && comp_lt_flat && plateau_lt_flat;
    if (rep.certified) {
        rep.verdict = "certified";
    } else if (!h1) {
        rep.verdict = "not certified: mean convexity sample failed";
    } else if (!comp_lt_flat) {
        rep.verdict = "not certified: competitor excess not below flat excess";
    } else {
        rep.verdict = "not certified: descent did not beat the flat disk";
    }
    return rep;
}

}  // namespace minidisk
