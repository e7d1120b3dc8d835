#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "minidisk/counterexample.hpp"
#include "minidisk/csv.hpp"
#include "minidisk/family.hpp"
#include "minidisk/geometry.hpp"

namespace {

using namespace minidisk;

struct GlobalConfig {
    std::string metric = "euclidean";
    double r = 4.0, eps = 0.05, m = 0.1, alpha = 0.95;
    std::string out = ".";
    int nr = 64, ntheta = 128;
    double tol = 1e-10;
    unsigned seed = 0;  // all sampling is deterministic; kept for reproducibility
};

MetricField make_metric(const GlobalConfig& g) {
    return metric_from_name(
        g.metric, {{"r", g.r}, {"eps", g.eps}, {"m", g.m}, {"alpha", g.alpha}});
}

std::string out_path(const GlobalConfig& g, const std::string& name) {
    std::filesystem::create_directories(g.out);
    return (std::filesystem::path(g.out) / name).string();
}

Vec3 to_vec3(const std::vector<double>& v, const char* what) {
    if (v.size() != 3)
        throw CLI::ValidationError(std::string(what) + " needs 3 components");
    return Vec3(v[0], v[1], v[2]);
}

void write_solution_files(const GlobalConfig& cfg, const DiskSolution& sol) {
    CsvWriter csv(out_path(cfg, "solution.csv"),
                  {"status", "p1", "p2", "p3", "v1", "v2", "v3", "t",
                   "iterations", "residual_inf", "area", "embedded"});
    csv.write_row({"ok", csv_num(sol.params.p[0]), csv_num(sol.params.p[1]),
                   csv_num(sol.params.p[2]), csv_num(sol.params.v[0]),
                   csv_num(sol.params.v[1]), csv_num(sol.params.v[2]),
                   csv_num(sol.params.t), std::to_string(sol.diag.iterations),
                   csv_num(sol.diag.residual_inf), csv_num(sol.diag.area),
                   sol.diag.embedded ? "1" : "0"});
    CsvWriter log(out_path(cfg, "newton_log.csv"),
                  {"iter", "residual_inf", "step_scale"});
    for (const auto& row : sol.newton_log)
        log.write_row({std::to_string(row.iter), csv_num(row.residual_inf),
                       csv_num(row.step_scale)});
    export_obj(build_surface_mesh(sol), out_path(cfg, "disk.obj"));
}

int cmd_solve(const GlobalConfig& cfg, const std::vector<double>& pv,
              const std::vector<double>& vv, double t) {
    const MetricField field = make_metric(cfg);
    const Vec3 p = to_vec3(pv, "--p").normalized();
    const Vec3 v = vv.empty() ? gauge_v(p) : to_vec3(vv, "--v").normalized();
    SolveOptions so;
    so.nr = cfg.nr;
    so.ntheta = cfg.ntheta;
    so.newton.tol = cfg.tol;
    so.check_h1 = true;
    SolveOutcome oc = solve_disk(field, {p, v, t}, so);
    if (!oc.ok()) {
        std::cerr << "solve failed: " << oc.message << "\n";
        return 2;
    }
    write_solution_files(cfg, *oc.sol);
    return 0;
}

int cmd_sweep(const GlobalConfig& cfg, const std::vector<double>& pv,
              const std::vector<double>& vv, double t_from, double t_to) {
    const MetricField field = make_metric(cfg);
    const Vec3 p = to_vec3(pv, "--p").normalized();
    const Vec3 v = vv.empty() ? gauge_v(p) : to_vec3(vv, "--v").normalized();
    SweepControls ctl;
    ctl.solve.nr = cfg.nr;
    ctl.solve.ntheta = cfg.ntheta;
    ctl.solve.newton.tol = cfg.tol;
    SweepResult res = continuation_sweep(field, p, v, t_from, t_to, ctl);
    CsvWriter csv(out_path(cfg, "sweep.csv"), {"t", "residual", "area", "min_gap"});
    for (size_t k = 0; k < res.solutions.size(); ++k) {
        const DiskSolution& s = res.solutions[k];
        double gap = 0.0;
        if (k > 0) {
            std::vector<DiskSolution> pair(res.solutions.begin() + (k - 1),
                                           res.solutions.begin() + (k + 1));
            gap = check_foliation(pair).min_gap;
        }
        csv.write_row({csv_num(s.params.t), csv_num(s.diag.residual_inf),
                       csv_num(s.diag.area), csv_num(gap)});
    }
    if (res.stalled) {
        std::cerr << res.message << "\n";
        return 2;
    }
    const FoliationReport fol = check_foliation(res.solutions);
    std::cout << "foliation: " << (fol.ok ? "ok" : "violated")
              << " min_gap=" << csv_num(fol.min_gap) << "\n";
    return fol.ok ? 0 : 2;
}

void write_target_csv(const GlobalConfig& cfg, const TargetResult& tr) {
    CsvWriter csv(out_path(cfg, "target.csv"),
                  {"status", "residual", "p1", "p2", "p3", "t", "iters"});
    if (tr.ok()) {
        const FrameParams& fp = tr.sol->params;
        csv.write_row({"ok", csv_num(tr.residual), csv_num(fp.p[0]),
                       csv_num(fp.p[1]), csv_num(fp.p[2]), csv_num(fp.t),
                       std::to_string(tr.iterations)});
    } else {
        csv.write_row({to_string(tr.status), csv_num(tr.residual), "", "", "", "",
                       std::to_string(tr.iterations)});
    }
}

int cmd_target(const GlobalConfig& cfg, const std::vector<double>& qv,
               const std::vector<double>& plane) {
    const MetricField field = make_metric(cfg);
    if (plane.size() != 6)
        throw CLI::ValidationError("--plane needs 6 components");
    TargetOptions opts;
    opts.nr = cfg.nr;
    opts.ntheta = cfg.ntheta;
    opts.newton.tol = cfg.tol;
    TargetResult tr = target_point_plane(
        field, to_vec3(qv, "--q"), Vec3(plane[0], plane[1], plane[2]),
        Vec3(plane[3], plane[4], plane[5]), opts);
    write_target_csv(cfg, tr);
    if (!tr.ok()) {
        std::cerr << "targeting failed: " << to_string(tr.status)
                  << " (best residual " << tr.residual << ")\n";
        return 2;
    }
    write_solution_files(cfg, *tr.sol);
    return 0;
}

int cmd_three_points(const GlobalConfig& cfg, const std::vector<double>& q1,
                     const std::vector<double>& q2,
                     const std::vector<double>& q3) {
    const MetricField field = make_metric(cfg);
    TargetOptions opts;
    opts.nr = cfg.nr;
    opts.ntheta = cfg.ntheta;
    opts.newton.tol = cfg.tol;
    TargetResult tr =
        target_three_points(field, to_vec3(q1, "--q1"), to_vec3(q2, "--q2"),
                            to_vec3(q3, "--q3"), opts);
    write_target_csv(cfg, tr);
    CsvWriter locs(out_path(cfg, "chart_locations.csv"),
                   {"x1", "y1", "x2", "y2", "x3", "y3"});
    if (tr.chart_locations.size() == 3)
        locs.write_row({csv_num(tr.chart_locations[0][0]),
                        csv_num(tr.chart_locations[0][1]),
                        csv_num(tr.chart_locations[1][0]),
                        csv_num(tr.chart_locations[1][1]),
                        csv_num(tr.chart_locations[2][0]),
                        csv_num(tr.chart_locations[2][1])});
    if (!tr.ok()) {
        std::cerr << "targeting failed: " << to_string(tr.status) << "\n";
        return 2;
    }
    write_solution_files(cfg, *tr.sol);
    return 0;
}

int cmd_asymptotic(const GlobalConfig& cfg, const std::vector<double>& qv,
                   const std::vector<double>& plane,
                   const std::vector<double>& radii) {
    const MetricField field = make_metric(cfg);
    if (plane.size() != 6)
        throw CLI::ValidationError("--plane needs 6 components");
    const TargetSpec spec = TargetSpec::point_plane(
        to_vec3(qv, "--q"), Vec3(plane[0], plane[1], plane[2]),
        Vec3(plane[3], plane[4], plane[5]));
    TargetOptions opts;
    opts.nr = cfg.nr;
    opts.ntheta = cfg.ntheta;
    opts.newton.tol = cfg.tol;
    const auto rows = asymptotic_sweep(field, spec, radii, opts);
    CsvWriter csv(out_path(cfg, "asymptotic.csv"),
                  {"R", "area", "ratio", "p1", "p2", "p3", "t"});
    bool all_ok = true;
    for (const auto& row : rows) {
        if (row.status != TargetStatus::ok) {
            all_ok = false;
            csv.write_row({csv_num(row.R), "", "", "", "", "", ""});
            continue;
        }
        csv.write_row({csv_num(row.R), csv_num(row.area), csv_num(row.ratio),
                       csv_num(row.fp.p[0]), csv_num(row.fp.p[1]),
                       csv_num(row.fp.p[2]), csv_num(row.fp.t)});
    }
    if (!all_ok) std::cerr << "asymptotic sweep: some radii failed\n";
    return all_ok ? 0 : 2;
}

int cmd_counterexample(const GlobalConfig& cfg, double r, double eps, double R) {
    CounterexampleParams params{r, eps, R};
    const CounterexampleReport rep = verify_counterexample(params);
    CsvWriter csv(out_path(cfg, "counterexample.csv"),
                  {"r", "eps", "R", "excess_flat", "excess_competitor",
                   "plateau_area_excess", "h1_min_mean_curv", "verdict"});
    csv.write_row({csv_num(rep.params.r), csv_num(rep.params.eps),
                   csv_num(rep.params.R), csv_num(rep.excess_flat),
                   csv_num(rep.excess_competitor),
                   csv_num(rep.plateau_area_excess),
                   csv_num(rep.h1_min_mean_curv), rep.verdict});
    std::cout << "verdict: " << rep.verdict << "\n";
    return rep.certified || rep.verdict.rfind("inconclusive", 0) == 0 ? 0 : 2;
}

int cmd_verify_jacobian(const GlobalConfig& cfg, const std::vector<double>& thetas) {
    CsvWriter csv(out_path(cfg, "jacobian.csv"),
                  {"theta", "max_abs_diff", "leading_form_err", "inverse_err"});
    const Vec3 p = Vec3::UnitZ(), v = Vec3::UnitX();
    for (double th : thetas) {
        const ThreePointJacobianReport rep = three_point_jacobian(p, v, th);
        csv.write_row({csv_num(th), csv_num(rep.max_abs_diff),
                       csv_num(rep.leading_form_err), csv_num(rep.inverse_err)});
    }
    return 0;
}

int cmd_rectify(const GlobalConfig& cfg, const std::vector<double>& pv,
                const std::vector<double>& vv, double t) {
    const MetricField field = make_metric(cfg);
    const Vec3 p = to_vec3(pv, "--p").normalized();
    const Vec3 v = vv.empty() ? gauge_v(p) : to_vec3(vv, "--v").normalized();
    SolveOptions so;
    so.nr = cfg.nr;
    so.ntheta = cfg.ntheta;
    so.newton.tol = cfg.tol;
    SolveOutcome oc = solve_disk(field, {p, v, t}, so);
    if (!oc.ok()) {
        std::cerr << "solve failed: " << oc.message << "\n";
        return 2;
    }
    try {
        const DiskDiffeo y = boundary_conformalizing_diffeo(*oc.sol);
        const double defect = conformal_defect(*oc.sol, y);
        double boundary_err = 0.0;
        const DiskGrid& g = *oc.sol->w_chart.grid;
        for (int j = 0; j < g.ntheta(); ++j)
            boundary_err = std::max(
                boundary_err,
                (y.at(g.nr(), j) -
                 Eigen::Vector2d(g.cos_theta(j), g.sin_theta(j)))
                    .norm());
        CsvWriter csv(out_path(cfg, "rectify.csv"),
                      {"status", "min_jacobian", "r0", "conformal_defect",
                       "boundary_identity_err"});
        csv.write_row({"ok", csv_num(y.min_jacobian), csv_num(y.r0),
                       csv_num(defect), csv_num(boundary_err)});
    } catch (const std::runtime_error& e) {
        std::cerr << "rectification failed: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

int cmd_export(const GlobalConfig& cfg, const std::vector<double>& pv,
               const std::vector<double>& vv, double t) {
    const MetricField field = make_metric(cfg);
    const Vec3 p = to_vec3(pv, "--p").normalized();
    const Vec3 v = vv.empty() ? gauge_v(p) : to_vec3(vv, "--v").normalized();
    SolveOptions so;
    so.nr = cfg.nr;
    so.ntheta = cfg.ntheta;
    so.newton.tol = cfg.tol;
    SolveOutcome oc = solve_disk(field, {p, v, t}, so);
    if (!oc.ok()) {
        std::cerr << "solve failed: " << oc.message << "\n";
        return 2;
    }
    export_obj(build_surface_mesh(*oc.sol), out_path(cfg, "disk.obj"));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Minimal disks in Riemannian 3-balls: graph solver, "
                 "continuation, targeting, and the quarter-disk comparison"};
    app.require_subcommand(1);
    app.fallthrough(true);
    app.set_config("--config");
    app.allow_config_extras(false);

    GlobalConfig cfg;
    app.add_option("--metric", cfg.metric,
                   "euclidean | conformal_bump | schwarzschild | conical");
    app.add_option("--r", cfg.r, "bump offset");
    app.add_option("--eps", cfg.eps, "bump amplitude");
    app.add_option("--m", cfg.m, "mass parameter");
    app.add_option("--alpha", cfg.alpha, "cone opening");
    app.add_option("--out", cfg.out, "output directory");
    app.add_option("--nr", cfg.nr, "radial resolution");
    app.add_option("--ntheta", cfg.ntheta, "angular resolution");
    app.add_option("--tol", cfg.tol, "solver tolerance");
    app.add_option("--seed", cfg.seed, "sampling seed (runs are deterministic)");

    std::vector<double> pv{0.0, 0.0, 1.0}, vv, qv, plane, q1, q2, q3;
    std::vector<double> radii{5.0, 10.0, 20.0};
    std::vector<double> thetas{0.1};
    double t = 0.5, t_from = 0.99, t_to = 0.5;
    double ce_r = 4.0, ce_eps = 0.05, ce_R = 0.0;

    CLI::App* solve = app.add_subcommand("solve", "solve one disk");
    solve->add_option("--p", pv, "frame point")->delimiter(',');
    solve->add_option("--v", vv, "frame origin marker")->delimiter(',');
    solve->add_option("--t", t, "circle offset in (-1,1)")->required();

    CLI::App* sweep = app.add_subcommand("sweep", "continuation sweep in t");
    sweep->add_option("--p", pv, "frame point")->delimiter(',');
    sweep->add_option("--v", vv, "frame origin marker")->delimiter(',');
    sweep->add_option("--t-from", t_from, "start offset");
    sweep->add_option("--t-to", t_to, "end offset");

    CLI::App* target = app.add_subcommand("target", "disk through q tangent to a plane");
    target->add_option("--q", qv, "target point")->delimiter(',')->required();
    target->add_option("--plane", plane, "two spanning vectors (6 numbers)")
        ->delimiter(',')
        ->required();

    CLI::App* three = app.add_subcommand("three-points", "disk through three points");
    three->add_option("--q1", q1, "first point")->delimiter(',')->required();
    three->add_option("--q2", q2, "second point")->delimiter(',')->required();
    three->add_option("--q3", q3, "third point")->delimiter(',')->required();

    CLI::App* asym = app.add_subcommand("asymptotic", "large-ball area sweep");
    asym->add_option("--q", qv, "target point")->delimiter(',')->required();
    asym->add_option("--plane", plane, "two spanning vectors (6 numbers)")
        ->delimiter(',')
        ->required();
    asym->add_option("--radii", radii, "ball radii")->delimiter(',');

    CLI::App* ce = app.add_subcommand("counterexample",
                                      "quarter-disk non-minimality report");
    ce->add_option("--r", ce_r, "bump offset");
    ce->add_option("--eps", ce_eps, "bump amplitude");
    ce->add_option("--R", ce_R, "domain radius (0 = minimal admissible)");

    CLI::App* vj = app.add_subcommand("verify-jacobian",
                                      "three-point Jacobian cross-checks");
    vj->add_option("--theta", thetas, "angles")->delimiter(',');

    CLI::App* rectify = app.add_subcommand(
        "rectify", "boundary-conformalizing reparametrization report");
    rectify->add_option("--p", pv, "frame point")->delimiter(',');
    rectify->add_option("--v", vv, "frame origin marker")->delimiter(',');
    rectify->add_option("--t", t, "circle offset")->required();

    CLI::App* exp = app.add_subcommand("export", "solve and export the mesh");
    exp->add_option("--p", pv, "frame point")->delimiter(',');
    exp->add_option("--v", vv, "frame origin marker")->delimiter(',');
    exp->add_option("--t", t, "circle offset")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (solve->parsed()) return cmd_solve(cfg, pv, vv, t);
        if (sweep->parsed()) return cmd_sweep(cfg, pv, vv, t_from, t_to);
        if (target->parsed()) return cmd_target(cfg, qv, plane);
        if (three->parsed()) return cmd_three_points(cfg, q1, q2, q3);
        if (asym->parsed()) return cmd_asymptotic(cfg, qv, plane, radii);
        if (ce->parsed()) return cmd_counterexample(cfg, ce_r, ce_eps, ce_R);
        if (vj->parsed()) return cmd_verify_jacobian(cfg, thetas);
        if (rectify->parsed()) return cmd_rectify(cfg, pv, vv, t);
        if (exp->parsed()) return cmd_export(cfg, pv, vv, t);
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid arguments: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
