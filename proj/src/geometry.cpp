#include "minidisk/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <unordered_map>

namespace minidisk {

SurfaceMesh build_surface_mesh(const DiskSolution& sol) {
    const DiskGrid& g = *sol.w_chart.grid;
    SurfaceMesh m;
    m.vertices.resize(g.n_nodes());
    m.vertices[0] = sol.chart.ambient(0.0, 0.0, sol.w_chart.pole());
    for (int i = 1; i <= g.nr(); ++i)
        for (int j = 0; j < g.ntheta(); ++j)
            m.vertices[g.node(i, j)] = sol.immersion_node(i, j);

    for (int j = 0; j < g.ntheta(); ++j)
        m.triangles.push_back({0, g.node(1, j), g.node(1, j + 1)});
    for (int i = 1; i < g.nr(); ++i)
        for (int j = 0; j < g.ntheta(); ++j) {
            const int a = g.node(i, j), b = g.node(i + 1, j);
            const int c = g.node(i + 1, j + 1), d = g.node(i, j + 1);
            m.triangles.push_back({a, b, c});
            m.triangles.push_back({a, c, d});
        }

    m.normals.assign(m.vertices.size(), Vec3::Zero());
    for (const auto& t : m.triangles) {
        const Vec3 n = (m.vertices[t[1]] - m.vertices[t[0]])
                           .cross(m.vertices[t[2]] - m.vertices[t[0]]);
        for (int k = 0; k < 3; ++k) m.normals[t[k]] += n;
    }
    for (auto& n : m.normals) {
        const double len = n.norm();
        if (len > 0.0) n /= len;
    }
    return m;
}

namespace {

struct CellKey {
    int x, y, z;
    bool operator<(const CellKey& o) const {
        return std::tie(x, y, z) < std::tie(o.x, o.y, o.z);
    }
};

bool segment_hits_triangle(const Vec3& p0, const Vec3& p1, const Vec3& a,
                           const Vec3& b, const Vec3& c) {
    const Vec3 dir = p1 - p0;
    const Vec3 e1 = b - a, e2 = c - a;
    const Vec3 pv = dir.cross(e2);
    const double det = e1.dot(pv);
    const double scale = e1.norm() * e2.norm();
    if (std::abs(det) < 1e-14 * scale * dir.norm()) return false;
    const double inv = 1.0 / det;
    const Vec3 tv = p0 - a;
    const double u = tv.dot(pv) * inv;
    if (u < 1e-10 || u > 1.0 - 1e-10) return false;
    const Vec3 qv = tv.cross(e1);
    const double v = dir.dot(qv) * inv;
    if (v < 1e-10 || u + v > 1.0 - 1e-10) return false;
    const double t = e2.dot(qv) * inv;
    return t > 1e-10 && t < 1.0 - 1e-10;
}

}  // namespace

bool mesh_self_intersects(const SurfaceMesh& mesh) {
    // unique edges
    std::set<std::pair<int, int>> edge_set;
    for (const auto& t : mesh.triangles)
        for (int k = 0; k < 3; ++k) {
            int a = t[k], b = t[(k + 1) % 3];
            if (a > b) std::swap(a, b);
            edge_set.insert({a, b});
        }
    std::vector<std::pair<int, int>> edges(edge_set.begin(), edge_set.end());

    double mean_edge = 0.0;
    for (const auto& [a, b] : edges)
        mean_edge += (mesh.vertices[a] - mesh.vertices[b]).norm();
    mean_edge /= std::max<size_t>(1, edges.size());
    const double cell = std::max(mean_edge * 2.0, 1e-12);

    auto key_of = [cell](const Vec3& p) {
        return CellKey{static_cast<int>(std::floor(p[0] / cell)),
                       static_cast<int>(std::floor(p[1] / cell)),
                       static_cast<int>(std::floor(p[2] / cell))};
    };

    std::map<CellKey, std::vector<int>> grid;
    for (size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        Vec3 lo = mesh.vertices[tri[0]], hi = lo;
        for (int k = 1; k < 3; ++k) {
            lo = lo.cwiseMin(mesh.vertices[tri[k]]);
            hi = hi.cwiseMax(mesh.vertices[tri[k]]);
        }
        const CellKey klo = key_of(lo), khi = key_of(hi);
        for (int x = klo.x; x <= khi.x; ++x)
            for (int y = klo.y; y <= khi.y; ++y)
                for (int z = klo.z; z <= khi.z; ++z)
                    grid[{x, y, z}].push_back(static_cast<int>(t));
    }

    std::vector<int> seen(mesh.triangles.size(), -1);
    for (size_t e = 0; e < edges.size(); ++e) {
        const auto& [a, b] = edges[e];
        const Vec3& p0 = mesh.vertices[a];
        const Vec3& p1 = mesh.vertices[b];
        const Vec3 lo = p0.cwiseMin(p1), hi = p0.cwiseMax(p1);
        const CellKey klo = key_of(lo), khi = key_of(hi);
        for (int x = klo.x; x <= khi.x; ++x)
            for (int y = klo.y; y <= khi.y; ++y)
                for (int z = klo.z; z <= khi.z; ++z) {
                    auto it = grid.find({x, y, z});
                    if (it == grid.end()) continue;
                    for (int t : it->second) {
                        if (seen[t] == static_cast<int>(e)) continue;
                        seen[t] = static_cast<int>(e);
                        const auto& tri = mesh.triangles[t];
                        if (tri[0] == a || tri[1] == a || tri[2] == a ||
                            tri[0] == b || tri[1] == b || tri[2] == b)
                            continue;
                        if (segment_hits_triangle(p0, p1, mesh.vertices[tri[0]],
                                                  mesh.vertices[tri[1]],
                                                  mesh.vertices[tri[2]]))
                            return true;
                    }
                }
    }
    return false;
}

double mesh_area(const SurfaceMesh& mesh, const MetricField& field) {
    double area = 0.0;
    for (const auto& t : mesh.triangles) {
        const Vec3& p0 = mesh.vertices[t[0]];
        const Vec3 a = mesh.vertices[t[1]] - p0;
        const Vec3 b = mesh.vertices[t[2]] - p0;
        const Vec3 centroid = (p0 + mesh.vertices[t[1]] + mesh.vertices[t[2]]) / 3.0;
        const Mat3 g = field.eval(centroid);
        const double E = a.dot(g * a), F = a.dot(g * b), G = b.dot(g * b);
        area += 0.5 * std::sqrt(std::max(0.0, E * G - F * F));
    }
    return area;
}

double chamfer_distance(const SurfaceMesh& a, const SurfaceMesh& b) {
    auto directed = [](const SurfaceMesh& from, const SurfaceMesh& to) {
        double worst = 0.0;
        for (const Vec3& p : from.vertices) {
            double best = std::numeric_limits<double>::infinity();
            for (const Vec3& q : to.vertices)
                best = std::min(best, (p - q).squaredNorm());
            worst = std::max(worst, best);
        }
        return std::sqrt(worst);
    };
    return std::max(directed(a, b), directed(b, a));
}

FrameFields frame_fields(const DiskSolution& sol) {
    const DiskGrid& g = *sol.w_chart.grid;
    const ChartMetric& chart = sol.chart;
    const NodalFirstDerivs nd = nodal_first_derivs(sol.w_chart);
    FrameFields f;
    f.nu.resize(g.n_nodes());
    f.h.resize(g.n_nodes());
    auto frame_at = [&](double wx, double wy, int node) {
        const Vec3 tx = chart.v() + wx * chart.p();
        const Vec3 ty = chart.pv() + wy * chart.p();
        const Vec3 cross = tx.cross(ty);
        const double cn = cross.norm(), txn = tx.norm();
        if (cn < 1e-14 || txn < 1e-14)
            throw std::runtime_error("immersion degenerate");
        f.nu[node] = cross / cn;
        f.h[node] = tx / txn;
    };
    const Eigen::Vector2d pg = pole_gradient(sol.w_chart);
    frame_at(pg[0], pg[1], 0);
    for (int i = 1; i <= g.nr(); ++i) {
        const double r = g.radius(i);
        for (int j = 0; j < g.ntheta(); ++j) {
            const int n = g.node(i, j);
            const double c = g.cos_theta(j), s = g.sin_theta(j);
            const double wx = c * nd.wr[n] - s * nd.wt[n] / r;
            const double wy = s * nd.wr[n] + c * nd.wt[n] / r;
            frame_at(wx, wy, n);
        }
    }
    return f;
}

Mat3 quaternion_to_rotation(double a, double b, double c, double d) {
    const double n = a * a + b * b + c * c + d * d;
    if (std::abs(n - 1.0) > 1e-12)
        throw std::invalid_argument("quaternion_to_rotation: not unit norm");
    Mat3 m;
    m << a * a + b * b - c * c - d * d, 2.0 * (-a * d + b * c), 2.0 * (a * c + b * d),
        2.0 * (a * d + b * c), a * a - b * b + c * c - d * d, 2.0 * (-a * b + c * d),
        2.0 * (-a * c + b * d), 2.0 * (a * b + c * d), a * a - b * b - c * c + d * d;
    return m;
}

double trace_invariant(const Vec3& nu, const Vec3& h) {
    if (std::abs(nu.norm() - 1.0) > 1e-9 || std::abs(h.norm() - 1.0) > 1e-9 ||
        std::abs(nu.dot(h)) > 1e-9)
        throw std::invalid_argument("trace_invariant: pair not orthonormal");
    const Vec3 nh = nu.cross(h);
    return nu[0] + h[1] + nh[2];
}

double cut_locus_margin(const DiskSolution& sol) {
    const DiskGrid& g = *sol.w_chart.grid;
    const FrameFields f = frame_fields(sol);
    Mat3 q;
    q.col(0) = sol.params.p;
    q.col(1) = sol.params.v;
    q.col(2) = sol.params.p.cross(sol.params.v);
    double margin = std::numeric_limits<double>::infinity();
    for (int j = 0; j < g.ntheta(); ++j) {
        const int n = g.node(g.nr(), j);
        Mat3 m;
        m.col(0) = f.nu[n];
        m.col(1) = f.h[n];
        m.col(2) = f.nu[n].cross(f.h[n]);
        margin = std::min(margin, (q.transpose() * m).trace());
    }
    return margin;
}

namespace {

double quintic_cutoff(double s) {
    if (s <= 0.5) return 1.0;
    if (s >= 1.0) return 0.0;
    const double tau = 2.0 * s - 1.0;
    return 1.0 - tau * tau * tau * (10.0 + tau * (-15.0 + 6.0 * tau));
}

double quintic_cutoff_deriv(double s) {
    if (s <= 0.5 || s >= 1.0) return 0.0;
    const double tau = 2.0 * s - 1.0;
    return -2.0 * 30.0 * tau * tau * (1.0 - tau) * (1.0 - tau);
}

struct CutoffProfile {
    double r0;
    double phi(double r) const {
        if (r <= 1.0 - r0) return 1.0;
        return quintic_cutoff(1.0 + (r - 1.0) / r0);
    }
    double dphi(double r) const {
        if (r <= 1.0 - r0) return 0.0;
        return quintic_cutoff_deriv(1.0 + (r - 1.0) / r0) / r0;
    }
};

// spectral derivative of a periodic sample set
std::vector<Eigen::Vector2d> spectral_theta_deriv(
    const std::vector<Eigen::Vector2d>& f) {
    const int n = static_cast<int>(f.size());
    std::vector<Eigen::Vector2d> d(n, Eigen::Vector2d::Zero());
    for (int comp = 0; comp < 2; ++comp) {
        for (int k = 1; k <= n / 2; ++k) {
            double a = 0.0, b = 0.0;
            for (int j = 0; j < n; ++j) {
                const double ang = 2.0 * M_PI * k * j / n;
                a += f[j][comp] * std::cos(ang);
                b += f[j][comp] * std::sin(ang);
            }
            const double scale = (k == n / 2) ? 1.0 / n : 2.0 / n;
            if (k == n / 2) continue;  // Nyquist derivative drops
            for (int j = 0; j < n; ++j) {
                const double ang = 2.0 * M_PI * k * j / n;
                d[j][comp] += scale * k * (-a * std::sin(ang) + b * std::cos(ang));
            }
        }
    }
    return d;
}

}  // namespace

DiskDiffeo boundary_conformalizing_diffeo(const DiskSolution& sol) {
    const DiskGrid& g = *sol.w_chart.grid;
    const ChartMetric& chart = sol.chart;
    const NodalFirstDerivs nd = nodal_first_derivs(sol.w_chart);
    const int nt = g.ntheta(), nr = g.nr();

    // boundary field X = DF^{-1}(-nu ^ dF/dtheta)
    std::vector<Eigen::Vector2d> X(nt);
    for (int j = 0; j < nt; ++j) {
        const int n = g.node(nr, j);
        const double c = g.cos_theta(j), s = g.sin_theta(j);
        const double wx = c * nd.wr[n] - s * nd.wt[n];
        const double wy = s * nd.wr[n] + c * nd.wt[n];
        const Vec3 fx = chart.sin_beta() * (chart.v() + wx * chart.p());
        const Vec3 fy = chart.sin_beta() * (chart.pv() + wy * chart.p());
        const Vec3 ftheta = -s * fx + c * fy;  // r = 1
        const Vec3 nu = fx.cross(fy).normalized();
        const Vec3 rot = -nu.cross(ftheta);
        Eigen::Matrix<double, 3, 2> df;
        df.col(0) = fx;
        df.col(1) = fy;
        const Eigen::Vector2d xc =
            (df.transpose() * df).ldlt().solve(df.transpose() * rot);
        X[j] = xc;
        if (xc.dot(Eigen::Vector2d(c, s)) <= 0.0)
            throw std::runtime_error(
                "boundary_conformalizing_diffeo: <X, e_r> <= 0 at a boundary node");
    }
    const std::vector<Eigen::Vector2d> Xp = spectral_theta_deriv(X);

    double lambda0 = 0.0;
    for (const auto& x : X) lambda0 = std::max(lambda0, x.norm());
    // positivity of (r psi + (1-psi)(1 + lambda0 (r-1)))' on [1/2, 1]
    bool cutoff_ok = true;
    for (int k = 0; k <= 200; ++k) {
        const double s = 0.5 + 0.5 * k / 200.0;
        const double ps = quintic_cutoff(s), dps = quintic_cutoff_deriv(s);
        const double val = ps + (s - 1.0) * dps * (1.0 - lambda0) + (1.0 - ps) * lambda0;
        if (val <= 0.0) cutoff_ok = false;
    }
    if (!cutoff_ok)
        throw std::runtime_error(
            "boundary_conformalizing_diffeo: cutoff positivity failed for this "
            "boundary field");

    for (double r0 = 0.5; r0 >= 2.5 * g.dr(); r0 *= 0.5) {
        const CutoffProfile prof{r0};
        DiskDiffeo y;
        y.grid = sol.w_chart.grid;
        y.r0 = r0;
        y.boundary_field = X;
        y.points.resize(g.n_nodes());
        y.points[0] = Eigen::Vector2d::Zero();
        double min_jac = std::numeric_limits<double>::infinity();
        for (int i = 1; i <= nr; ++i) {
            const double r = g.radius(i);
            const double ph = prof.phi(r);
            const double A = r * ph + 1.0 - ph;
            const double B = (1.0 - ph) * (r - 1.0);
            for (int j = 0; j < nt; ++j) {
                const Eigen::Vector2d er(g.cos_theta(j), g.sin_theta(j));
                y.points[g.node(i, j)] = A * er + B * X[j];
            }
        }
        for (int i = 1; i <= nr; ++i) {
            const double r = g.radius(i);
            const double ph = prof.phi(r), dph = prof.dphi(r);
            const double A = r * ph + 1.0 - ph;
            const double Ap = ph + (r - 1.0) * dph;
            const double B = (1.0 - ph) * (r - 1.0);
            const double Bp = (1.0 - ph) - dph * (r - 1.0);
            for (int j = 0; j < nt; ++j) {
                const Eigen::Vector2d er(g.cos_theta(j), g.sin_theta(j));
                const Eigen::Vector2d et(-g.sin_theta(j), g.cos_theta(j));
                const Eigen::Vector2d yr = Ap * er + Bp * X[j];
                const Eigen::Vector2d yt = A * et + B * Xp[j];
                const double det = (yr[0] * yt[1] - yr[1] * yt[0]) / r;
                min_jac = std::min(min_jac, det);
            }
        }
        y.min_jacobian = std::min(min_jac, 1.0);
        if (min_jac > 0.0) return y;
    }
    throw std::runtime_error(
        "boundary_conformalizing_diffeo: no cutoff radius gives a positive "
        "Jacobian");
}

namespace {

double defect_of_pair(const Vec3& dr, const Vec3& dt) {
    const double ndr = dr.norm(), ndt = dt.norm();
    if (ndr < 1e-15 || ndt < 1e-15) return std::numeric_limits<double>::infinity();
    return std::abs(dr.dot(dt)) / (ndr * ndt) + std::abs(ndr - ndt) / ndt;
}

}  // namespace

double conformal_defect(const DiskSolution& sol, const DiskDiffeo& y) {
    const DiskGrid& g = *sol.w_chart.grid;
    if (y.grid->nr() != g.nr() || y.grid->ntheta() != g.ntheta())
        throw std::invalid_argument("conformal_defect: incompatible grids");
    const ChartMetric& chart = sol.chart;
    const DiskInterpolant& itp = sol.interpolant();
    double worst = 0.0;
    for (int j = 0; j < g.ntheta(); ++j) {
        const double c = g.cos_theta(j), s = g.sin_theta(j);
        double w, wx, wy;
        itp.value_grad(c, s, &w, &wx, &wy);
        const Vec3 fx = chart.sin_beta() * (chart.v() + wx * chart.p());
        const Vec3 fy = chart.sin_beta() * (chart.pv() + wy * chart.p());
        const Eigen::Vector2d xr = y.boundary_radial_deriv(j);
        const Eigen::Vector2d xt(-s, c);  // boundary trace is the identity
        const Vec3 dr = xr[0] * fx + xr[1] * fy;
        const Vec3 dt = xt[0] * fx + xt[1] * fy;
        worst = std::max(worst, defect_of_pair(dr, dt));
    }
    return worst;
}

double conformal_defect_of_map(
    const std::function<Vec3(double, double)>& /*immersion*/,
    const std::function<Vec3(double, double)>& d_dx,
    const std::function<Vec3(double, double)>& d_dy, const DiskDiffeo& y) {
    const DiskGrid& g = *y.grid;
    double worst = 0.0;
    for (int j = 0; j < g.ntheta(); ++j) {
        const double c = g.cos_theta(j), s = g.sin_theta(j);
        const Vec3 fx = d_dx(c, s), fy = d_dy(c, s);
        const Eigen::Vector2d xr = y.boundary_radial_deriv(j);
        const Eigen::Vector2d xt(-s, c);
        const Vec3 dr = xr[0] * fx + xr[1] * fy;
        const Vec3 dt = xt[0] * fx + xt[1] * fy;
        worst = std::max(worst, defect_of_pair(dr, dt));
    }
    return worst;
}

DiskDiffeo identity_diffeo(GridPtr grid) {
    DiskDiffeo y;
    y.grid = std::move(grid);
    const DiskGrid& g = *y.grid;
    y.points.resize(g.n_nodes());
    y.points[0] = Eigen::Vector2d::Zero();
    for (int i = 1; i <= g.nr(); ++i)
        for (int j = 0; j < g.ntheta(); ++j)
            y.points[g.node(i, j)] = g.radius(i) *
                Eigen::Vector2d(g.cos_theta(j), g.sin_theta(j));
    y.boundary_field.resize(g.ntheta());
    for (int j = 0; j < g.ntheta(); ++j)
        y.boundary_field[j] = Eigen::Vector2d(g.cos_theta(j), g.sin_theta(j));
    y.min_jacobian = 1.0;
    y.r0 = 0.5;
    return y;
}

Eigen::Matrix<double, 9, 9> three_point_leading_form(double c) {
    Eigen::Matrix<double, 9, 9> m = Eigen::Matrix<double, 9, 9>::Zero();
    m(0, 0) = -1; m(0, 3) = -1;
    m(1, 1) = c;  m(1, 2) = 1;
    m(2, 1) = -1; m(2, 3) = -1;
    m(3, 0) = 1;  m(3, 3) = -1;
    m(4, 0) = c;  m(4, 3) = c;  m(4, 4) = 1;
    m(5, 0) = c;  m(5, 2) = -1; m(5, 5) = 1;
    m(6, 1) = c;  m(6, 3) = c;  m(6, 6) = 1;
    m(7, 0) = c;  m(7, 3) = -c; m(7, 7) = 1;
    m(8, 1) = c;  m(8, 2) = -1; m(8, 8) = 1;
    return m;
}

Eigen::Matrix<double, 9, 9> three_point_leading_inverse(double c) {
    Eigen::Matrix<double, 9, 9> n = Eigen::Matrix<double, 9, 9>::Zero();
    n(0, 0) = -0.5; n(0, 3) = 0.5;
    n(1, 0) = 0.5; n(1, 2) = -1; n(1, 3) = 0.5;
    n(2, 0) = -0.5 * c; n(2, 1) = 1; n(2, 2) = c; n(2, 3) = -0.5 * c;
    n(3, 0) = -0.5; n(3, 3) = -0.5;
    n(4, 0) = c; n(4, 4) = 1;
    n(5, 1) = 1; n(5, 2) = c; n(5, 3) = -c; n(5, 5) = 1;
    n(6, 2) = c; n(6, 6) = 1;
    n(7, 3) = -c; n(7, 7) = 1;
    n(8, 0) = -c; n(8, 1) = 1; n(8, 2) = 2.0 * c; n(8, 3) = -c; n(8, 8) = 1;
    return n;
}

ThreePointJacobianReport three_point_jacobian(const Vec3& p, const Vec3& v,
                                              double theta) {
    if (!(theta > 0.0) || !(theta < M_PI / 2.0))
        throw std::invalid_argument("three_point_jacobian: theta out of (0, pi/2)");
    if (std::abs(p.norm() - 1.0) > 1e-12 || std::abs(v.norm() - 1.0) > 1e-12 ||
        std::abs(p.dot(v)) > 1e-12)
        throw std::invalid_argument("three_point_jacobian: bad frame");

    const double st = std::sin(theta), ct = std::cos(theta);
    ThreePointJacobianReport rep;
    Eigen::Matrix<double, 9, 9>& m = rep.analytic;
    m.setZero();
    m(0, 0) = -st; m(0, 3) = -st;
    m(1, 1) = ct;  m(1, 2) = st;
    m(2, 1) = -st; m(2, 3) = -st;
    m(3, 0) = st;  m(3, 3) = -st;
    m(4, 0) = ct;  m(4, 3) = ct;  m(4, 4) = st;
    m(5, 0) = ct;  m(5, 2) = -st; m(5, 5) = st;
    m(6, 1) = ct;  m(6, 3) = ct;  m(6, 6) = st;
    m(7, 0) = ct;  m(7, 3) = -ct; m(7, 7) = st;
    m(8, 1) = ct;  m(8, 2) = -st; m(8, 8) = st;

    // finite differences of the exactly evaluable flat three-point map
    const Vec3 pv = p.cross(v);
    auto hmap = [&](const Vec3& pp, const Vec3& vv, double th, double x1,
                    double x2, double y2, double x3, double y3) {
        const Vec3 ppv = pp.cross(vv);
        const double sn = std::sin(th), cs = std::cos(th);
        auto F = [&](double x, double y) { return Vec3(sn * (x * vv + y * ppv) + cs * pp); };
        Eigen::Matrix<double, 9, 1> out;
        out.segment<3>(0) = F(x1, 0.0);
        out.segment<3>(3) = F(x2, y2);
        out.segment<3>(6) = F(x3, y3);
        return out;
    };
    // rotation curves through (p, v) realizing the three frame directions
    auto frame_curve = [&](int k, double s) {
        Vec3 pp = p, vv = v;
        const double cs = std::cos(s), sn = std::sin(s);
        if (k == 0) {  // (q, w) = (v, -p)
            pp = cs * p + sn * v;
            vv = cs * v - sn * p;
        } else if (k == 1) {  // (q, w) = (p^v, 0)
            pp = cs * p + sn * pv;
        } else {  // (q, w) = (0, p^v)
            vv = cs * v + sn * pv;
        }
        return std::make_pair(pp, vv);
    };

    const double h = 1e-6;
    Eigen::Matrix<double, 9, 9> fd;
    const double base[6] = {theta, 1.0, 0.0, 1.0, -1.0, 0.0};
    for (int col = 0; col < 9; ++col) {
        Eigen::Matrix<double, 9, 1> fp, fm;
        if (col < 3) {
            const auto [pp1, vv1] = frame_curve(col, h);
            const auto [pp2, vv2] = frame_curve(col, -h);
            fp = hmap(pp1, vv1, base[0], base[1], base[2], base[3], base[4], base[5]);
            fm = hmap(pp2, vv2, base[0], base[1], base[2], base[3], base[4], base[5]);
        } else {
            double args[6];
            std::copy(base, base + 6, args);
            args[col - 3] += h;
            fp = hmap(p, v, args[0], args[1], args[2], args[3], args[4], args[5]);
            args[col - 3] -= 2.0 * h;
            fm = hmap(p, v, args[0], args[1], args[2], args[3], args[4], args[5]);
        }
        fd.col(col) = (fp - fm) / (2.0 * h);
    }
    // express the three output points in the rows' frame components
    auto to_rows = [&](const Eigen::Matrix<double, 9, 9>& cart) {
        Eigen::Matrix<double, 9, 9> rows;
        for (int col = 0; col < 9; ++col) {
            const Vec3 d1 = cart.block<3, 1>(0, col);
            const Vec3 d2 = cart.block<3, 1>(3, col);
            const Vec3 d3 = cart.block<3, 1>(6, col);
            rows(0, col) = d1.dot(p);
            rows(1, col) = d1.dot(pv);
            rows(2, col) = d2.dot(p);
            rows(3, col) = d3.dot(p);
            rows(4, col) = d1.dot(v);
            rows(5, col) = d2.dot(v);
            rows(6, col) = d2.dot(pv);
            rows(7, col) = d3.dot(v);
            rows(8, col) = d3.dot(pv);
        }
        return rows;
    };
    const Eigen::Matrix<double, 9, 9> fd_rows = to_rows(fd);
    rep.max_abs_diff = (m - fd_rows).cwiseAbs().maxCoeff();

    const double c = ct / st;
    rep.leading_form_err =
        (m - st * three_point_leading_form(c)).cwiseAbs().maxCoeff();
    const Eigen::Matrix<double, 9, 9> minv = m.inverse();
    rep.inverse_err =
        (st * minv - three_point_leading_inverse(c)).cwiseAbs().maxCoeff();
    return rep;
}

void export_obj(const SurfaceMesh& mesh, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("export_obj: cannot open " + path);
    char buf[160];
    for (const Vec3& p : mesh.vertices) {
        std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", p[0], p[1], p[2]);
        out << buf;
    }
    for (const auto& t : mesh.triangles) {
        std::snprintf(buf, sizeof buf, "f %d %d %d\n", t[0] + 1, t[1] + 1, t[2] + 1);
        out << buf;
    }
    if (!out.good()) throw std::runtime_error("export_obj: write failed " + path);
}

SurfaceMesh import_obj(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("import_obj: cannot open " + path);
    SurfaceMesh m;
    std::string tag;
    while (in >> tag) {
        if (tag == "v") {
            Vec3 p;
            in >> p[0] >> p[1] >> p[2];
            m.vertices.push_back(p);
        } else if (tag == "f") {
            std::array<int, 3> t;
            in >> t[0] >> t[1] >> t[2];
            for (int& i : t) --i;
            m.triangles.push_back(t);
        } else {
            std::string rest;
            std::getline(in, rest);
        }
    }
    return m;
}

}  // namespace minidisk
