#ifndef MINIDISK_COUNTEREXAMPLE_HPP
#define MINIDISK_COUNTEREXAMPLE_HPP

#include <string>
#include <vector>

#include "minidisk/metric.hpp"

namespace minidisk {

/// Parameters of the four-bump metric (1 + psi_{r,eps})^2 g0 and the
/// quarter-domain Plateau comparison at radius R.
struct CounterexampleParams {
    double r = 4.0;
    double eps = 0.05;
    double R = 0.0;  // 0 -> (sqrt(2)+1)(1+r)

    void validate() const;
    double domain_radius() const;
};

/// The bump sum at a point (0 <= psi <= eps^2, supported in four squashed
/// ellipsoids).
double bump_psi(const CounterexampleParams& params, const Vec3& x);
Vec3 bump_psi_gradient(const CounterexampleParams& params, const Vec3& x);

struct QuarterDiskArea {
    double total = 0.0;
    double excess = 0.0;  // over (1/4) pi R^2
};

/// Area of the flat quarter disk {z = 0} under the bump metric; the excess is
/// integrated directly over the bump footprint.
QuarterDiskArea quarter_disk_area(const CounterexampleParams& params);

/// Same excess from a midpoint rule on an n x n grid over the footprint box
/// (grid-convergence audits).
double quarter_disk_excess_grid(const CounterexampleParams& params, int n);

/// Euclidean area of the radial logarithmic competitor graph over the quarter
/// domain.
double competitor_area(const CounterexampleParams& params);
double competitor_excess(const CounterexampleParams& params);

/// Height profile of the competitor as a function of the distance to the
/// quarter-domain bump center.
double competitor_height(const CounterexampleParams& params, double rho);

/// The bump offset at which the competitor bound crosses the quarter-disk
/// bound as eps -> 0: the root of ln(1+r) = (10/9)^2.
double crossover_threshold();

/// Polar grid over the quarter disk with zero Dirichlet data on its boundary.
struct QuarterGrid {
    int nr = 128;
    int ntheta = 128;
    double R = 0.0;

    int n_nodes() const { return (nr + 1) * (ntheta + 1); }
    int node(int i, int j) const { return i * (ntheta + 1) + j; }
    bool is_boundary(int i, int j) const {
        return i == 0 || i == nr || j == 0 || j == ntheta;
    }
    double radius(int i) const { return R * i / nr; }
    double theta(int j) const { return 0.5 * M_PI * j / ntheta; }
};

struct PlateauResult {
    Eigen::VectorXd u;     // nodal heights on the quarter grid
    double area = 0.0;     // discrete energy of the final graph
    double excess = 0.0;   // area - (1/4) pi R^2 (discrete quadrature)
    int iterations = 0;
    bool converged = false;
    bool monotone = true;  // area non-increasing across accepted steps
};

/// Discrete weighted-area functional of a nodal graph over the quarter grid.
double plateau_energy(const CounterexampleParams& params, const QuarterGrid& grid,
                      const Eigen::VectorXd& u);

/// Gradient descent with backtracking on the weighted-area functional,
/// starting from the provided heights (zero boundary trace required).
PlateauResult plateau_graph_minimize(const CounterexampleParams& params,
                                     const QuarterGrid& grid,
                                     Eigen::VectorXd u0, int max_iter,
                                     double tol);

/// Competitor heights sampled on the quarter grid (a feasible warm start).
Eigen::VectorXd sample_competitor(const CounterexampleParams& params,
                                  const QuarterGrid& grid);

struct CounterexampleReport {
    CounterexampleParams params;
    double h1_min_mean_curv = 0.0;
    double excess_flat = 0.0;
    double excess_competitor = 0.0;
    double plateau_area_excess = 0.0;
    bool above_crossover = false;
    bool certified = false;
    std::string verdict;  // "certified" | "inconclusive" | failure note
};

/// Consolidated run: mean convexity samples, both excesses, Plateau descent,
/// and the strict inequality chain.
CounterexampleReport verify_counterexample(const CounterexampleParams& params);

}  // namespace minidisk

#endif
