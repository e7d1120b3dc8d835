#include "minidisk/family.hpp"

#include <algorithm>
#include <cmath>

#include "minidisk/geometry.hpp"

namespace minidisk {

void FrameParams::validate() const {
    if (std::abs(p.norm() - 1.0) > 1e-12 || std::abs(v.norm() - 1.0) > 1e-12 ||
        std::abs(p.dot(v)) > 1e-12)
        throw std::invalid_argument("FrameParams: (p, v) not an orthonormal pair");
    if (!(t > -1.0 && t < 1.0))
        throw std::invalid_argument("FrameParams: t must lie in (-1, 1)");
}

Vec3 gauge_v(const Vec3& p) {
    Vec3 e = Vec3::UnitX();
    if (std::abs(e.dot(p)) > 0.9) e = Vec3::UnitY();
    const Vec3 w = e - e.dot(p) * p;
    return w / w.norm();
}

Vec3 parallel_circle(const FrameParams& fp, double theta) {
    fp.validate();
    const double s = std::sqrt(1.0 - fp.t * fp.t);
    return fp.t * fp.p +
           s * (std::cos(theta) * fp.v + std::sin(theta) * fp.p.cross(fp.v));
}

const DiskInterpolant& DiskSolution::interpolant() const {
    if (!interp_cache)
        interp_cache = std::make_shared<const DiskInterpolant>(w_chart);
    return *interp_cache;
}

namespace {

double max_chart_gradient(const GraphFunction& w) {
    const DiskGrid& g = *w.grid;
    const NodalFirstDerivs nd = nodal_first_derivs(w);
    double m = pole_gradient(w).norm();
    for (int i = 1; i <= g.nr(); ++i) {
        const double r = g.radius(i);
        for (int j = 0; j < g.ntheta(); ++j) {
            const int n = g.node(i, j);
            const double wx = g.cos_theta(j) * nd.wr[n] -
                              g.sin_theta(j) * nd.wt[n] / r;
            const double wy = g.sin_theta(j) * nd.wr[n] +
                              g.cos_theta(j) * nd.wt[n] / r;
            m = std::max(m, std::sqrt(wx * wx + wy * wy));
        }
    }
    return m;
}

void seed_from_height_coefficient(const MetricField& field,
                                  const FrameParams& fp,
                                  const ChartMetric& chart, GraphFunction& w) {
    const double lam = initial_height_coefficient(field, fp.p, fp.v);
    if (lam == 0.0) return;
    const double scale = (1.0 - fp.t) * lam / chart.sin_beta();
    const DiskGrid& g = *w.grid;
    w.values[0] = scale;
    for (int i = 1; i < g.nr(); ++i) {
        const double r = g.radius(i);
        for (int j = 0; j < g.ntheta(); ++j)
            w.at(i, j) = scale * (1.0 - r * r);
    }
}

}  // namespace

SolveOutcome solve_disk(const MetricField& field, const FrameParams& fp,
                        const SolveOptions& opts) {
    fp.validate();
    SolveOutcome out;
    if (opts.check_h1) {
        const double h1 = sphere_mean_curvature(field, 1.0, 256);
        if (!(h1 > 0.0)) {
            out.status = SolveStatus::mean_convexity_failed;
            out.message = "working sphere is not mean convex (min H = " +
                          std::to_string(h1) + ")";
            return out;
        }
    }
    const double beta = std::acos(fp.t);
    ChartMetric chart = pullback_graph_metric(field, fp.p, fp.v, beta);
    GridPtr grid = build_grid(opts.nr, opts.ntheta);
    GraphFunction w(grid);
    NewtonResult nr;
    if (opts.warm_start && opts.warm_start->grid->nr() == opts.nr &&
        opts.warm_start->grid->ntheta() == opts.ntheta) {
        w.values = opts.warm_start->values;
        w.enforce_boundary_zero();
        nr = newton_solve(chart, w, opts.newton);
    } else {
        nr = cascade_solve(chart, w, opts.newton, [&](GraphFunction& wc) {
            seed_from_height_coefficient(field, fp, chart, wc);
        });
    }
    out.status = nr.status;
    out.message = nr.message;
    if (nr.status != SolveStatus::ok) return out;

    DiskSolution sol{fp, chart, w, GraphFunction(grid), field.label, {},
                     std::move(nr.log), nullptr};
    sol.heights.values = chart.sin_beta() * w.values;
    sol.diag.residual_inf = nr.residual_inf;
    sol.diag.iterations = nr.iterations;
    sol.diag.area = graph_area(chart, w);
    sol.diag.chart_grad_max = max_chart_gradient(w);
    if (opts.check_embedded)
        sol.diag.embedded = !mesh_self_intersects(build_surface_mesh(sol));
    out.sol = std::move(sol);
    return out;
}

SweepResult continuation_sweep(const MetricField& field, const Vec3& p,
                               const Vec3& v, double t_from, double t_to,
                               const SweepControls& ctl) {
    if (std::abs(t_from) <= std::abs(t_to))
        throw std::invalid_argument(
            "continuation_sweep: t_from must be closer to +-1 than t_to");
    SweepResult res;
    const double dir = (t_to > t_from) ? 1.0 : -1.0;

    SolveOptions so = ctl.solve;
    so.warm_start = nullptr;
    SolveOutcome first = solve_disk(field, {p, v, t_from}, so);
    if (!first.ok()) {
        res.stalled = true;
        res.message = "continuation stalled at t = " + std::to_string(t_from) +
                      " (" + first.message + ")";
        return res;
    }
    res.solutions.push_back(std::move(*first.sol));
    res.last_good_t = t_from;

    GraphFunction warm = res.solutions.back().w_chart;
    double t = t_from;
    double dt = ctl.dt0;
    while (std::abs(t - t_to) > 1e-12) {
        double t_next = t + dir * dt;
        if ((t_to - t_next) * dir < 0.0) t_next = t_to;
        so.warm_start = &warm;
        SolveOutcome oc = solve_disk(field, {p, v, t_next}, so);
        if (oc.ok()) {
            t = t_next;
            res.last_good_t = t;
            warm = oc.sol->w_chart;
            res.solutions.push_back(std::move(*oc.sol));
            dt = std::min(dt * 1.5, ctl.dt0);
        } else {
            dt *= 0.5;
            if (dt < ctl.dt_min) {
                res.stalled = true;
                res.message = "continuation stalled at t = " + std::to_string(t) +
                              " (" + oc.message + ")";
                return res;
            }
        }
    }
    return res;
}

FoliationReport check_foliation(const std::vector<DiskSolution>& sols) {
    FoliationReport rep;
    if (sols.size() < 2)
        throw std::invalid_argument("check_foliation: need at least 2 solutions");
    const DiskGrid& g0 = *sols.front().w_chart.grid;
    for (const auto& s : sols) {
        const DiskGrid& g = *s.w_chart.grid;
        if (g.nr() != g0.nr() || g.ntheta() != g0.ntheta())
            throw std::invalid_argument("check_foliation: mismatched grids");
        if ((s.params.p - sols.front().params.p).norm() > 1e-12 ||
            (s.params.v - sols.front().params.v).norm() > 1e-12)
            throw std::invalid_argument("check_foliation: mixed (p, v) frames");
    }
    rep.ok = true;
    rep.min_gap = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k + 1 < sols.size(); ++k) {
        const double dt = sols[k + 1].params.t - sols[k].params.t;
        if (dt == 0.0) {
            rep.ok = false;
            rep.min_gap = 0.0;
            return rep;
        }
        const double dir = dt > 0.0 ? 1.0 : -1.0;
        const Eigen::VectorXd gap =
            dir * ((sols[k + 1].params.t + sols[k + 1].heights.values.array()) -
                   (sols[k].params.t + sols[k].heights.values.array()))
                      .matrix();
        const double mg = gap.minCoeff();
        rep.min_gap = std::min(rep.min_gap, mg);
        if (mg <= 0.0) rep.ok = false;
    }
    // direction must be uniform along the list
    for (size_t k = 0; k + 2 < sols.size(); ++k) {
        const double d1 = sols[k + 1].params.t - sols[k].params.t;
        const double d2 = sols[k + 2].params.t - sols[k + 1].params.t;
        if (d1 * d2 <= 0.0) rep.ok = false;
    }
    return rep;
}

double disk_area(const DiskSolution& sol, const MetricField& field) {
    const ChartMetric chart = pullback_graph_metric(
        field, sol.params.p, sol.params.v, std::acos(sol.params.t));
    return graph_area(chart, sol.w_chart);
}

TargetSpec TargetSpec::point_plane(const Vec3& q, const Vec3& v1, const Vec3& v2) {
    TargetSpec s;
    s.kind = Kind::point_plane;
    s.q = q;
    s.v1 = v1;
    s.v2 = v2;
    return s;
}

TargetSpec TargetSpec::three_points(const Vec3& q1, const Vec3& q2, const Vec3& q3) {
    TargetSpec s;
    s.kind = Kind::three_points;
    s.q1 = q1;
    s.q2 = q2;
    s.q3 = q3;
    return s;
}

std::string to_string(TargetStatus s) {
    switch (s) {
        case TargetStatus::ok: return "ok";
        case TargetStatus::not_reached: return "target not reached";
        case TargetStatus::no_descent: return "no descent";
    }
    return "?";
}

namespace {

// chart coordinates of an ambient point (the chart map is affine)
Eigen::Vector3d chart_coords(const ChartMetric& chart, const Vec3& q) {
    const Vec3 d = q - chart.t() * chart.p();
    return Eigen::Vector3d(d.dot(chart.v()), d.dot(chart.pv()), d.dot(chart.p())) /
           chart.sin_beta();
}

struct GnEval {
    Eigen::VectorXd r;
    DiskSolution sol;
    std::vector<Eigen::Vector2d> locations;
};

class TargetProblem {
public:
    TargetProblem(const MetricField& field, const TargetSpec& spec,
                  const TargetOptions& opts)
        : field_(field), spec_(spec), opts_(opts) {
        if (spec.kind == TargetSpec::Kind::point_plane) {
            w1_ = spec.v1.normalized();
            Vec3 w2 = spec.v2 - spec.v2.dot(w1_) * w1_;
            const double n = w2.norm();
            if (n < 1e-12)
                throw std::invalid_argument("target plane vectors not independent");
            w2_ = w2 / n;
        }
    }

    std::optional<GnEval> eval(const Vec3& p, double t,
                               const GraphFunction* warm) const {
        FrameParams fp{p, gauge_v(p), t};
        SolveOptions so;
        so.nr = opts_.nr;
        so.ntheta = opts_.ntheta;
        so.newton = opts_.newton;
        so.check_embedded = false;
        so.warm_start = warm;
        SolveOutcome oc = solve_disk(field_, fp, so);
        if (!oc.ok()) return std::nullopt;
        GnEval ge{Eigen::VectorXd(3), std::move(*oc.sol), {}};
        const ChartMetric& chart = ge.sol.chart;
        const DiskInterpolant& itp = ge.sol.interpolant();
        if (spec_.kind == TargetSpec::Kind::point_plane) {
            const Eigen::Vector3d zeta = chart_coords(chart, spec_.q);
            double w, wx, wy;
            itp.value_grad(zeta[0], zeta[1], &w, &wx, &wy);
            const Vec3 tx = chart.v() + wx * chart.p();
            const Vec3 ty = chart.pv() + wy * chart.p();
            const Vec3 nu = tx.cross(ty).normalized();
            ge.r << zeta[2] - w, nu.dot(w1_), nu.dot(w2_);
            ge.locations = {Eigen::Vector2d(zeta[0], zeta[1])};
        } else {
            const Vec3 qs[3] = {spec_.q1, spec_.q2, spec_.q3};
            for (int k = 0; k < 3; ++k) {
                const Eigen::Vector3d zeta = chart_coords(chart, qs[k]);
                ge.r[k] = zeta[2] - itp.value(zeta[0], zeta[1]);
                ge.locations.emplace_back(zeta[0], zeta[1]);
            }
        }
        return ge;
    }

    TargetResult run(const std::vector<std::pair<Vec3, double>>& seeds) const {
        TargetResult best;
        best.residual = std::numeric_limits<double>::infinity();
        int total_iters = 0;
        for (const auto& [p_seed, t_seed] : seeds) {
            TargetResult r = run_single(p_seed, t_seed, &total_iters);
            if (r.ok()) {
                r.iterations = total_iters;
                return r;
            }
            if (r.residual < best.residual) best = r;
        }
        best.iterations = total_iters;
        return best;
    }

private:
    TargetResult run_single(Vec3 p, double t, int* total_iters) const {
        TargetResult res;
        res.residual = std::numeric_limits<double>::infinity();
        std::optional<GnEval> cur = eval(p, t, nullptr);
        if (!cur) return res;
        double rnorm = cur->r.norm();
        const double h = opts_.fd_step;

        for (int it = 0; it < opts_.max_iter; ++it) {
            ++*total_iters;
            if (rnorm <= opts_.tol) break;
            // local orthonormal chart on the sphere at p
            const Vec3 e1 = gauge_v(p);
            const Vec3 e2 = p.cross(e1);
            Eigen::Matrix3d jac;
            bool jac_ok = true;
            for (int k = 0; k < 3 && jac_ok; ++k) {
                auto move = [&](double s) {
                    Vec3 pp = p;
                    double tt = t;
                    if (k == 0) pp = (p + s * e1).normalized();
                    if (k == 1) pp = (p + s * e2).normalized();
                    if (k == 2) tt = std::clamp(t + s, -0.999, 0.999);
                    return std::make_pair(pp, tt);
                };
                const auto [pp1, tt1] = move(h);
                const auto [pp2, tt2] = move(-h);
                auto rp = eval(pp1, tt1, &cur->sol.w_chart);
                auto rm = eval(pp2, tt2, &cur->sol.w_chart);
                if (!rp || !rm) {
                    jac_ok = false;
                    break;
                }
                jac.col(k) = (rp->r - rm->r) / (2.0 * h);
            }
            if (!jac_ok) break;

            const Eigen::Vector3d step =
                jac.colPivHouseholderQr().solve(-cur->r);
            if (!step.allFinite()) break;

            bool accepted = false;
            double scale = 1.0;
            for (int hsteps = 0; hsteps < 12; ++hsteps) {
                const Vec3 pp =
                    (p + scale * (step[0] * e1 + step[1] * e2)).normalized();
                const double tt = std::clamp(t + scale * step[2], -0.999, 0.999);
                auto trial = eval(pp, tt, &cur->sol.w_chart);
                if (trial && (trial->r.norm() < rnorm || trial->r.norm() <= opts_.tol)) {
                    p = pp;
                    t = tt;
                    cur = std::move(trial);
                    rnorm = cur->r.norm();
                    accepted = true;
                    break;
                }
                scale *= 0.5;
            }
            if (!accepted) {
                res.status = TargetStatus::no_descent;
                break;
            }
        }

        res.residual = rnorm;
        res.chart_locations = cur->locations;
        if (rnorm <= opts_.tol) {
            res.status = TargetStatus::ok;
            res.sol = std::move(cur->sol);
        }
        return res;
    }

    const MetricField& field_;
    TargetSpec spec_;
    TargetOptions opts_;
    Vec3 w1_ = Vec3::UnitX(), w2_ = Vec3::UnitY();
};

std::vector<std::pair<Vec3, double>> seed_list(const Vec3& p_direct,
                                               const Vec3& anchor) {
    std::vector<std::pair<Vec3, double>> seeds;
    auto push = [&](const Vec3& p) {
        const Vec3 pn = p.normalized();
        seeds.emplace_back(pn, std::clamp(anchor.dot(pn), -0.9, 0.9));
    };
    push(p_direct);
    for (double sx : {1.0, -1.0})
        for (double sy : {1.0, -1.0})
            for (double sz : {1.0, -1.0}) push(Vec3(sx, sy, sz) / std::sqrt(3.0));
    return seeds;
}

}  // namespace

TargetResult target_point_plane(const MetricField& field, const Vec3& q,
                                const Vec3& v1, const Vec3& v2,
                                const TargetOptions& opts) {
    if (q.norm() >= 1.0)
        throw std::invalid_argument("target_point_plane: q must be interior");
    const Vec3 n = v1.cross(v2);
    if (n.norm() < 1e-12)
        throw std::invalid_argument("target plane vectors not independent");
    TargetProblem prob(field, TargetSpec::point_plane(q, v1, v2), opts);
    return prob.run(seed_list(n.normalized(), q));
}

TargetResult target_three_points(const MetricField& field, const Vec3& q1,
                                 const Vec3& q2, const Vec3& q3,
                                 const TargetOptions& opts) {
    for (const Vec3& q : {q1, q2, q3})
        if (q.norm() > 1.0 + 1e-12)
            throw std::invalid_argument("target_three_points: points must lie in the ball");
    const Vec3 cr = (q2 - q1).cross(q3 - q1);
    const double scale = (q2 - q1).norm() * (q3 - q1).norm();
    if (cr.norm() <= 1e-8 * std::max(scale, 1e-30))
        throw std::invalid_argument("collinear points");
    TargetProblem prob(field, TargetSpec::three_points(q1, q2, q3), opts);
    return prob.run(seed_list(cr.normalized(), (q1 + q2 + q3) / 3.0));
}

MetricField rescaled_field(const MetricField& field, double R) {
    if (!(R > 0.0)) throw std::invalid_argument("rescaled_field: R <= 0");
    MetricField f;
    f.label = field.label + "_rescaled";
    f.params = field.params;
    f.params["R"] = R;
    auto base_eval = field.eval;
    f.eval = [base_eval, R](const Vec3& x) { return base_eval(R * x); };
    if (field.eval_deriv) {
        auto base_deriv = field.eval_deriv;
        f.eval_deriv = [base_deriv, R](const Vec3& x) {
            MetricDeriv d = base_deriv(R * x);
            for (auto& m : d) m *= R;
            return d;
        };
    }
    return f;
}

std::vector<AsymptoticRow> asymptotic_sweep(const MetricField& field,
                                            const TargetSpec& target,
                                            const std::vector<double>& radii,
                                            const TargetOptions& opts) {
    std::vector<AsymptoticRow> rows;
    for (double R : radii) {
        const MetricField scaled = rescaled_field(field, R);
        TargetResult tr;
        if (target.kind == TargetSpec::Kind::point_plane)
            tr = target_point_plane(scaled, target.q / R, target.v1, target.v2,
                                    opts);
        else
            tr = target_three_points(scaled, target.q1 / R, target.q2 / R,
                                     target.q3 / R, opts);
        AsymptoticRow row;
        row.R = R;
        row.status = tr.status;
        if (tr.ok()) {
            row.area = R * R * tr.sol->diag.area;
            row.ratio = row.area / (M_PI * R * R);
            row.fp = tr.sol->params;
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace minidisk
