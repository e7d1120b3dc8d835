// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances are fixed here, not configurable.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <vector>

#include "minidisk/counterexample.hpp"
#include "minidisk/family.hpp"
#include "minidisk/geometry.hpp"

using namespace minidisk;

namespace {

int g_failures = 0;

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                             start)
            .count();
    }
};

void report(int id, const char* name, bool ok, const std::string& detail,
            double seconds) {
    std::printf("[%s] criterion %2d: %-28s %s (%.1f s)\n", ok ? "PASS" : "FAIL",
                id, name, detail.c_str(), seconds);
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

// ---------------------------------------------------------------------------

void criterion_1_euclidean_exactness() {
    Timer timer;
    bool ok = true;
    std::string detail;
    double worst_u = 0.0, worst_area = 0.0, worst_time = 0.0;
    for (double t : {0.0, 0.3, 0.6, 0.9}) {
        Timer solve_timer;
        SolveOptions so;
        so.nr = 64;
        so.ntheta = 128;
        SolveOutcome oc = solve_disk(euclidean(), {Vec3(0, 0, 1), Vec3(1, 0, 0), t}, so);
        const double dt = solve_timer.seconds();
        worst_time = std::max(worst_time, dt);
        if (!oc.ok()) {
            ok = false;
            detail = "solve failed at t=" + std::to_string(t);
            break;
        }
        worst_u = std::max(worst_u, oc.sol->heights.max_abs());
        worst_area = std::max(
            worst_area, std::abs(oc.sol->diag.area - M_PI * (1.0 - t * t)));
    }
    ok = ok && worst_u <= 1e-8 && worst_area <= 1e-6 && worst_time < 5.0;
    if (detail.empty())
        detail = fmt("max|u|=%.1e, area err=%.1e, slowest solve %.2f s", worst_u,
                     worst_area, worst_time);
    report(1, "euclidean exactness", ok, detail, timer.seconds());
}

void criterion_2_foliation() {
    Timer timer;
    bool ok = true;
    std::string detail;
    for (const MetricField& f :
         {euclidean(), schwarzschild(0.1), conformal_bump(4.0, 0.05)}) {
        Timer sweep_timer;
        SweepControls ctl;
        ctl.solve.nr = 64;
        ctl.solve.ntheta = 128;
        ctl.solve.check_embedded = false;
        SweepResult res =
            continuation_sweep(f, Vec3(0, 0, 1), Vec3(1, 0, 0), 0.99, 0.5, ctl);
        const double dt = sweep_timer.seconds();
        if (res.stalled) {
            ok = false;
            detail += f.label + ": stalled; ";
            continue;
        }
        const FoliationReport rep = check_foliation(res.solutions);
        const bool this_ok = rep.ok && rep.min_gap > 0.0 && dt < 120.0;
        ok = ok && this_ok;
        detail += fmt("%s: gap=%.1e %.0fs; ", f.label.c_str(), rep.min_gap, dt);
    }
    report(2, "foliation of sweeps", ok, detail, timer.seconds());
}

struct PlaneTarget {
    Vec3 q, v1, v2;
};

const std::vector<PlaneTarget>& plane_targets() {
    static const std::vector<PlaneTarget> targets = {
        {Vec3(0.2, 0.1, 0.3), Vec3(1, 0, 0), Vec3(0, 1, 0)},
        {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 0, 1)},
        {Vec3(-0.3, 0.2, 0.1), Vec3(1, 0, 1), Vec3(0, 1, 0)},
        {Vec3(0.1, -0.4, -0.2), Vec3(1, 1, 0), Vec3(-1, 1, 1)},
        {Vec3(0.25, 0.25, 0.25), Vec3(1, -1, 0), Vec3(1, 1, -2)},
    };
    return targets;
}

void criterion_3_point_plane() {
    Timer timer;
    bool ok = true;
    double worst_res = 0.0, worst_param = 0.0;
    std::string detail;
    const MetricField bump = conformal_bump(4.0, 0.01);
    for (const PlaneTarget& tg : plane_targets()) {
        TargetResult tr = target_point_plane(bump, tg.q, tg.v1, tg.v2, {});
        if (!tr.ok()) {
            ok = false;
            detail += "bump target failed; ";
            continue;
        }
        worst_res = std::max(worst_res, tr.residual);

        TargetResult te = target_point_plane(euclidean(), tg.q, tg.v1, tg.v2, {});
        if (!te.ok()) {
            ok = false;
            detail += "euclidean target failed; ";
            continue;
        }
        const Vec3 n = tg.v1.cross(tg.v2).normalized();
        const double align = 1.0 - std::abs(te.sol->params.p.dot(n));
        const double offset = std::abs(te.sol->params.t * te.sol->params.p.dot(n) -
                                       tg.q.dot(n));
        worst_param = std::max({worst_param, align, offset});
    }
    ok = ok && worst_res <= 1e-10 && worst_param <= 1e-6;
    detail += fmt("max residual=%.1e, closed-form err=%.1e", worst_res, worst_param);
    report(3, "point + tangent plane", ok, detail, timer.seconds());
}

void criterion_4_three_points() {
    Timer timer;
    bool ok = true;
    double worst_res = 0.0, worst_param = 0.0, loc_err = 1.0;
    std::string detail;
    const std::vector<std::array<Vec3, 3>> triples = {
        {Vec3(0.3, 0, 0.1), Vec3(0, 0.3, 0.1), Vec3(-0.3, 0, 0.1)},
        {Vec3(0.4, 0, 0), Vec3(0, 0.4, 0), Vec3(0, 0, 0.4)},
        {Vec3(0.2, 0.1, 0), Vec3(-0.1, 0.3, 0.2), Vec3(0, -0.2, 0.4)},
        {Vec3(0.5, 0, 0), Vec3(-0.25, 0.4, 0), Vec3(-0.25, -0.4, 0)},
        {Vec3(0.1, 0.2, 0.3), Vec3(0.3, -0.1, 0.2), Vec3(-0.2, 0.2, -0.1)},
    };
    const MetricField bump = conformal_bump(4.0, 0.01);
    for (const auto& tr3 : triples) {
        TargetResult te = target_three_points(euclidean(), tr3[0], tr3[1], tr3[2], {});
        if (!te.ok()) {
            ok = false;
            detail += "euclidean triple failed; ";
            continue;
        }
        const Vec3 n = (tr3[1] - tr3[0]).cross(tr3[2] - tr3[0]).normalized();
        const double align = 1.0 - std::abs(te.sol->params.p.dot(n));
        const double offset = std::abs(te.sol->params.t * te.sol->params.p.dot(n) -
                                       tr3[0].dot(n));
        worst_param = std::max({worst_param, align, offset});

        TargetResult tb = target_three_points(bump, tr3[0], tr3[1], tr3[2], {});
        if (!tb.ok()) {
            ok = false;
            detail += "bump triple failed; ";
            continue;
        }
        worst_res = std::max(worst_res, tb.residual);
    }
    // near-pole triple: chart locations (1, i, -1)
    {
        const double t = 0.95, s = std::sqrt(1.0 - t * t);
        const Vec3 p(0, 0, 1), v(1, 0, 0);
        TargetResult tr = target_three_points(euclidean(), t * p + s * v,
                                              t * p + s * p.cross(v),
                                              t * p - s * v, {});
        if (tr.ok() && tr.chart_locations.size() == 3) {
            const double sp = tr.sol->params.p[2] > 0 ? 1.0 : -1.0;
            loc_err = std::max(
                {(tr.chart_locations[0] - Eigen::Vector2d(1, 0)).norm(),
                 (tr.chart_locations[1] - Eigen::Vector2d(0, sp)).norm(),
                 (tr.chart_locations[2] - Eigen::Vector2d(-1, 0)).norm()});
        } else {
            ok = false;
            detail += "near-pole triple failed; ";
        }
    }
    ok = ok && worst_res <= 1e-10 && worst_param <= 1e-6 && loc_err <= 1e-4;
    detail += fmt("residual=%.1e, closed-form=%.1e, chart locations=%.1e",
                  worst_res, worst_param, loc_err);
    report(4, "three points", ok, detail, timer.seconds());
}

void criterion_5_jacobian() {
    Timer timer;
    bool ok = true;
    double worst_fd = 0.0;
    for (double th : {0.1, 0.3, 0.6}) {
        const ThreePointJacobianReport rep =
            three_point_jacobian(Vec3(0, 0, 1), Vec3(1, 0, 0), th);
        worst_fd = std::max(worst_fd, rep.max_abs_diff);
    }
    ok = ok && worst_fd <= 1e-6;
    // decay of the leading-form and inverse discrepancies at rate O(sin theta)
    double worst_lead_c = 0.0, worst_inv_c = 0.0;
    for (double th : {0.1, 0.05, 0.025}) {
        const ThreePointJacobianReport rep =
            three_point_jacobian(Vec3(0, 0, 1), Vec3(1, 0, 0), th);
        worst_lead_c = std::max(worst_lead_c, rep.leading_form_err / std::sin(th));
        worst_inv_c = std::max(worst_inv_c, rep.inverse_err / std::sin(th));
    }
    ok = ok && worst_lead_c <= 1.0 && worst_inv_c <= 1.0;
    const double secs = timer.seconds();
    ok = ok && secs < 10.0;
    report(5, "degenerate-limit jacobian", ok,
           fmt("fd err=%.1e, lead C=%.1e, inv C=%.1e", worst_fd, worst_lead_c,
               worst_inv_c),
           secs);
}

void criterion_6_counterexample() {
    Timer timer;
    const CounterexampleParams prm{4.0, 0.05, 0.0};
    const double eps2 = prm.eps * prm.eps;

    const double excess_flat = quarter_disk_area(prm).excess;
    const bool flat_ok = excess_flat >= 2.0 * M_PI * 0.81 * eps2 * 0.95;

    const double excess_comp = competitor_excess(prm);
    const bool comp_ok = excess_comp <= 2.0 * M_PI * eps2 / std::log(5.0) + 1e-4;

    QuarterGrid grid;
    grid.R = prm.domain_radius();
    const PlateauResult pl = plateau_graph_minimize(
        prm, grid, sample_competitor(prm, grid), 200, 1e-8);
    const bool plateau_ok = pl.excess <= excess_flat - 1e-3 && pl.monotone;

    const CounterexampleParams half{4.0, 0.025, 0.0};
    const double r_flat = excess_flat / quarter_disk_area(half).excess;
    const double r_comp = excess_comp / competitor_excess(half);
    const bool scaling_ok =
        r_flat >= 3.8 && r_flat <= 4.2 && r_comp >= 3.8 && r_comp <= 4.2;

    // crossover: the computed root must satisfy the defining equation; the
    // closed form e^{100/81} - 1 is the derived reference value
    const double rstar = crossover_threshold();
    const bool rstar_ok =
        std::abs(std::log(1.0 + rstar) - 100.0 / 81.0) <= 1e-10 &&
        std::abs(rstar - (std::exp(100.0 / 81.0) - 1.0)) <= 1e-5;

    const double secs = timer.seconds();
    const bool ok = flat_ok && comp_ok && plateau_ok && scaling_ok && rstar_ok &&
                    secs < 300.0;
    report(6, "quarter-disk counterexample", ok,
           fmt("flat=%.5f comp=%.5f plateau=%.5f scale=(%.2f,%.2f) r*=%.5f",
               excess_flat, excess_comp, pl.excess, r_flat, r_comp, rstar),
           secs);
}

void criterion_7_asymptotic() {
    Timer timer;
    const auto rows = asymptotic_sweep(
        schwarzschild(0.1),
        TargetSpec::point_plane(Vec3(0.2, 0.1, 0.3), Vec3(1, 0, 0), Vec3(0, 1, 0)),
        {5.0, 10.0, 20.0, 40.0}, {});
    bool ok = rows.size() == 4;
    std::string detail;
    double prev_dev = std::numeric_limits<double>::infinity();
    for (const AsymptoticRow& row : rows) {
        if (row.status != TargetStatus::ok) {
            ok = false;
            detail += fmt("R=%g failed; ", row.R);
            continue;
        }
        const double dev = std::abs(row.ratio - 1.0);
        ok = ok && row.ratio >= 0.9 && row.ratio <= 1.1 && dev <= prev_dev;
        prev_dev = dev;
        detail += fmt("%.4f ", row.ratio);
    }
    const double secs = timer.seconds();
    ok = ok && secs < 600.0;
    report(7, "quadratic area growth", ok, "ratios: " + detail, secs);
}

void criterion_8_rectification() {
    Timer timer;
    bool ok = true;
    std::string detail;
    double worst_defect = 0.0;
    const std::vector<std::pair<MetricField, double>> cases = {
        {euclidean(), 0.99},          {euclidean(), 0.6},
        {euclidean(), 0.2},           {euclidean(), -0.5},
        {conformal_bump(4.0, 0.05), 0.9}, {conformal_bump(4.0, 0.05), 0.4},
        {conformal_bump(4.0, 0.05), -0.3}, {schwarzschild(0.1), 0.9},
        {schwarzschild(0.1), 0.6},    {conical(0.95), 0.5},
    };
    for (const auto& [field, t] : cases) {
        SolveOptions so;
        so.nr = 64;
        so.ntheta = 128;
        so.check_embedded = false;
        SolveOutcome oc = solve_disk(field, {Vec3(0, 0, 1), Vec3(1, 0, 0), t}, so);
        if (!oc.ok()) {
            ok = false;
            detail += field.label + " solve failed; ";
            continue;
        }
        try {
            const DiskDiffeo y = boundary_conformalizing_diffeo(*oc.sol);
            const DiskGrid& g = *oc.sol->w_chart.grid;
            double btrace = 0.0;
            for (int j = 0; j < g.ntheta(); ++j)
                btrace = std::max(
                    btrace, (y.at(g.nr(), j) - Eigen::Vector2d(g.cos_theta(j),
                                                               g.sin_theta(j)))
                                .norm());
            const double defect = conformal_defect(*oc.sol, y);
            worst_defect = std::max(worst_defect, defect);
            ok = ok && y.min_jacobian > 0.0 && btrace < 1e-14 && defect < 1e-6;
        } catch (const std::exception& e) {
            ok = false;
            detail += std::string(e.what()) + "; ";
        }
    }
    // refinement on a genuinely curved case
    double d64 = 0.0, d128 = 0.0;
    for (int nr : {64, 128}) {
        SolveOptions so;
        so.nr = nr;
        so.ntheta = 2 * nr;
        so.check_embedded = false;
        SolveOutcome oc =
            solve_disk(schwarzschild(0.1), {Vec3(0, 0, 1), Vec3(1, 0, 0), 0.6}, so);
        if (!oc.ok()) {
            ok = false;
            continue;
        }
        (nr == 64 ? d64 : d128) =
            conformal_defect(*oc.sol, boundary_conformalizing_diffeo(*oc.sol));
    }
    ok = ok && d128 < d64;
    detail += fmt("max defect=%.1e, refinement %.1e -> %.1e", worst_defect, d64, d128);
    report(8, "boundary rectification", ok, detail, timer.seconds());
}

void criterion_9_cut_locus() {
    Timer timer;
    bool ok = true;
    double min_margin = std::numeric_limits<double>::infinity();
    for (const Vec3& pref :
         {Vec3(0, 0, 1), Vec3(1, 0, 0), Vec3(1, 1, 1), Vec3(-0.2, 0.7, -0.4)}) {
        const Vec3 p = pref.normalized();
        const Vec3 v = gauge_v(p);
        for (double t = -0.9 + 0.1; t < 0.9; t += 0.2) {
            SolveOptions so;
            so.nr = 24;
            so.ntheta = 48;
            so.check_embedded = false;
            SolveOutcome oc = solve_disk(euclidean(), {p, v, t}, so);
            if (!oc.ok()) {
                ok = false;
                continue;
            }
            min_margin = std::min(min_margin, cut_locus_margin(*oc.sol));
        }
    }
    ok = ok && min_margin > -0.9;

    std::mt19937 gen(2024);
    std::normal_distribution<double> gauss;
    double worst_q = 0.0;
    for (int k = 0; k < 1000; ++k) {
        Eigen::Vector4d q(gauss(gen), gauss(gen), gauss(gen), gauss(gen));
        q.normalize();
        const Mat3 rot = quaternion_to_rotation(q[0], q[1], q[2], q[3]);
        worst_q = std::max(
            worst_q,
            (rot.transpose() * rot - Mat3::Identity()).cwiseAbs().maxCoeff());
        worst_q = std::max(worst_q, std::abs(rot.determinant() - 1.0));
    }
    ok = ok && worst_q <= 1e-12;
    report(9, "cut-locus margin", ok,
           fmt("min relative trace=%.3f, quaternion defect=%.1e", min_margin,
               worst_q),
           timer.seconds());
}

void criterion_10_discretization() {
    Timer timer;
    bool ok = true;
    std::string detail;
    for (const MetricField& f : {schwarzschild(0.1), conical(0.95)}) {
        const ConvergenceReport rep =
            convergence_order(f, Vec3(0, 0, 1), Vec3(1, 0, 0), 0.7, 16, 32);
        const bool this_ok = !rep.exact && rep.order >= 1.5 && rep.order <= 2.5;
        ok = ok && this_ok;
        detail += fmt("%s order=%.2f; ", f.label.c_str(), rep.order);
    }
    // excess quadrature refinement
    const CounterexampleParams prm{4.0, 0.05, 0.0};
    const double ref = quarter_disk_area(prm).excess;
    double err[3];
    int idx = 0;
    for (int n : {32, 64, 128})
        err[idx++] = std::abs(quarter_disk_excess_grid(prm, n) - ref);
    const double ord1 = std::log2(err[0] / err[1]);
    const double ord2 = std::log2(err[1] / err[2]);
    ok = ok && ord1 >= 1.5 && ord2 >= 1.5;
    detail += fmt("excess quadrature orders %.2f, %.2f", ord1, ord2);
    report(10, "discretization audit", ok, detail, timer.seconds());
}

}  // namespace

int main() {
    std::printf("acceptance suite\n");
    criterion_1_euclidean_exactness();
    criterion_2_foliation();
    criterion_3_point_plane();
    criterion_4_three_points();
    criterion_5_jacobian();
    criterion_6_counterexample();
    criterion_7_asymptotic();
    criterion_8_rectification();
    criterion_9_cut_locus();
    criterion_10_discretization();
    if (g_failures == 0) {
        std::printf("all criteria passed\n");
        return 0;
    }
    std::printf("%d criteria FAILED\n", g_failures);
    return 1;
}
