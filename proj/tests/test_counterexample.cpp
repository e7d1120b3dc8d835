#include <doctest.h>

#include <random>

#include "minidisk/counterexample.hpp"

using namespace minidisk;

namespace {

std::mt19937& rng() {
    static std::mt19937 gen(31415);
    return gen;
}

const CounterexampleParams kDefault{4.0, 0.05, 0.0};

}  // namespace

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS((CounterexampleParams{-1.0, 0.05, 0.0}.validate()),
                    std::invalid_argument);
    CHECK_THROWS_AS((CounterexampleParams{4.0, 0.5, 0.0}.validate()),
                    std::invalid_argument);
    CHECK_THROWS_AS((CounterexampleParams{4.0, 0.05, 5.0}.validate()),
                    std::invalid_argument);
    CHECK(kDefault.domain_radius() ==
          doctest::Approx((std::sqrt(2.0) + 1.0) * 5.0));
}

TEST_CASE("bump sum value at a center and support bound") {
    const double e = 0.05;
    const CounterexampleParams prm{4.0, e, 0.0};
    CHECK(bump_psi(prm, Vec3(5.0, 5.0, 0.0)) == doctest::Approx(e * e).epsilon(1e-15));
    std::uniform_real_distribution<double> u(-14.0, 14.0);
    for (int k = 0; k < 300; ++k) {
        const Vec3 x(u(rng()), u(rng()), 0.2 * u(rng()) / 14.0);
        const double psi = bump_psi(prm, x);
        CHECK(psi >= 0.0);
        CHECK(psi <= e * e + 1e-15);
        if (x.norm() >= std::sqrt(2.0) * 6.0) CHECK(psi == 0.0);
    }
}

TEST_CASE("bump sum is symmetric under the coordinate reflections") {
    const CounterexampleParams prm{4.0, 0.05, 0.0};
    std::uniform_real_distribution<double> u(-8.0, 8.0);
    for (int k = 0; k < 100; ++k) {
        const Vec3 x(u(rng()), u(rng()), 0.04 * u(rng()) / 8.0);
        const double v = bump_psi(prm, x);
        CHECK(bump_psi(prm, Vec3(-x[0], x[1], x[2])) == v);
        CHECK(bump_psi(prm, Vec3(x[0], -x[1], x[2])) == v);
        CHECK(bump_psi(prm, Vec3(x[0], x[1], -x[2])) == v);
    }
}

TEST_CASE("bump gradient against central differences") {
    const CounterexampleParams prm{4.0, 0.05, 0.0};
    std::uniform_real_distribution<double> u(-1.2, 1.2);
    const double h = 1e-6;
    for (int k = 0; k < 100; ++k) {
        const Vec3 x = Vec3(5.0, 5.0, 0.0) +
                       Vec3(u(rng()), u(rng()), 0.05 * u(rng()));
        const Vec3 g = bump_psi_gradient(prm, x);
        for (int c = 0; c < 3; ++c) {
            Vec3 xp = x, xm = x;
            xp[c] += h;
            xm[c] -= h;
            const double fd = (bump_psi(prm, xp) - bump_psi(prm, xm)) / (2.0 * h);
            CHECK(std::abs(g[c] - fd) < 5e-7);
        }
    }
}

TEST_CASE("quarter-disk excess meets the displayed lower bound") {
    const QuarterDiskArea qa = quarter_disk_area(kDefault);
    const double bound = 2.0 * M_PI * 0.81 * 0.05 * 0.05;
    CHECK(qa.excess >= bound * 0.95);
    CHECK(qa.excess < bound * 1.3);
    CHECK(qa.total == doctest::Approx(0.25 * M_PI * kDefault.domain_radius() *
                                          kDefault.domain_radius() +
                                      qa.excess));
}

TEST_CASE("quarter-disk excess vanishes with the amplitude") {
    const CounterexampleParams tiny{4.0, 1e-4, 0.0};
    CHECK(quarter_disk_area(tiny).excess < 1e-7);
}

TEST_CASE("competitor area meets the displayed upper bound") {
    const double excess = competitor_excess(kDefault);
    CHECK(excess > 0.0);
    CHECK(excess <= 2.0 * M_PI * 0.0025 / std::log(5.0) + 1e-4);
    CHECK(competitor_area(kDefault) ==
          doctest::Approx(0.25 * M_PI * kDefault.domain_radius() *
                              kDefault.domain_radius() +
                          excess));
    // the strict comparison that drives the counterexample
    CHECK(quarter_disk_area(kDefault).excess - excess >= 0.002);
}

TEST_CASE("competitor height profile") {
    CHECK(competitor_height(kDefault, 0.5) == kDefault.eps);
    CHECK(competitor_height(kDefault, 1.0) == kDefault.eps);
    CHECK(competitor_height(kDefault, 5.0) == 0.0);
    CHECK(competitor_height(kDefault, 7.0) == 0.0);
    const double mid = competitor_height(kDefault, 2.0);
    CHECK(mid > 0.0);
    CHECK(mid < kDefault.eps);
}

TEST_CASE("crossover threshold solves its defining equation") {
    const double rstar = crossover_threshold();
    CHECK(std::abs(2.0 * M_PI / std::log(1.0 + rstar) - 2.0 * M_PI * 0.81) <
          1e-10);
    CHECK(std::abs(rstar - (std::exp(100.0 / 81.0) - 1.0)) < 1e-12);
    // below the threshold the displayed sufficient inequality fails
    CHECK(2.0 * M_PI / std::log(3.0) > 2.0 * M_PI * 0.81);
}

TEST_CASE("both excesses scale like the amplitude squared") {
    const CounterexampleParams half{4.0, 0.025, 0.0};
    const double flat_ratio =
        quarter_disk_area(kDefault).excess / quarter_disk_area(half).excess;
    const double comp_ratio = competitor_excess(kDefault) / competitor_excess(half);
    CHECK(flat_ratio >= 3.8);
    CHECK(flat_ratio <= 4.2);
    CHECK(comp_ratio >= 3.8);
    CHECK(comp_ratio <= 4.2);
}

TEST_CASE("limit coefficients of the excesses") {
    // flat-disk bound 2 pi (9/10)^2 keeps only the plateau of the profile;
    // the transition annulus adds mass, so the bound is one-sided
    const CounterexampleParams small{4.0, 0.01, 0.0};
    const double flat_coeff = quarter_disk_area(small).excess / (0.01 * 0.01);
    CHECK(flat_coeff >= 2.0 * M_PI * 0.81 * 0.999);
    CHECK(flat_coeff <= 2.0 * M_PI * 1.001);  // profile support is the unit disk
    const double comp_coeff = competitor_excess(small) / (0.01 * 0.01);
    CHECK(comp_coeff <= 2.0 * M_PI / std::log(5.0) * 1.001);
    CHECK(comp_coeff >= 0.25 * 2.0 * M_PI / std::log(5.0));
}

TEST_CASE("grid quadrature of the flat excess converges at order >= 1.5") {
    const double ref = quarter_disk_area(kDefault).excess;
    double err[3];
    int idx = 0;
    for (int n : {32, 64, 128})
        err[idx++] = std::abs(quarter_disk_excess_grid(kDefault, n) - ref);
    CHECK(std::log2(err[0] / err[1]) >= 1.5);
    CHECK(std::log2(err[1] / err[2]) >= 1.5);
}

TEST_CASE("plateau descent on the euclidean quarter disk stays flat") {
    const CounterexampleParams prm{4.0, 1e-6, 0.0};
    QuarterGrid grid;
    grid.nr = 48;
    grid.ntheta = 48;
    grid.R = prm.domain_radius();
    Eigen::VectorXd u0 = Eigen::VectorXd::Zero(grid.n_nodes());
    const PlateauResult res = plateau_graph_minimize(prm, grid, u0, 50, 1e-10);
    CHECK(res.converged);
    CHECK(res.u.cwiseAbs().maxCoeff() == 0.0);
    CHECK(res.area == doctest::Approx(0.25 * M_PI * grid.R * grid.R).epsilon(1e-12));
}

TEST_CASE("plateau descent from the competitor certifies non-minimality") {
    QuarterGrid grid;
    grid.R = kDefault.domain_radius();
    const PlateauResult res = plateau_graph_minimize(
        kDefault, grid, sample_competitor(kDefault, grid), 150, 1e-8);
    CHECK(res.monotone);
    CHECK(res.excess <= competitor_excess(kDefault) + 1e-3);
    CHECK(res.excess < quarter_disk_area(kDefault).excess - 1e-3);
}

TEST_CASE("plateau rejects infeasible starts") {
    QuarterGrid grid;
    grid.R = kDefault.domain_radius();
    Eigen::VectorXd bad = Eigen::VectorXd::Constant(grid.n_nodes(), 2.0 * kDefault.eps);
    CHECK_THROWS_AS(plateau_graph_minimize(kDefault, grid, bad, 10, 1e-8),
                    std::invalid_argument);
}

TEST_CASE("consolidated verification") {
    SUBCASE("defaults are certified") {
        const CounterexampleReport rep = verify_counterexample(kDefault);
        CHECK(rep.certified);
        CHECK(rep.verdict == "certified");
        CHECK(rep.h1_min_mean_curv > 0.0);
        CHECK(rep.above_crossover);
        CHECK(rep.excess_competitor < rep.excess_flat);
        CHECK(rep.plateau_area_excess < rep.excess_flat);
    }
    SUBCASE("below the crossover the report is inconclusive") {
        const CounterexampleReport rep =
            verify_counterexample(CounterexampleParams{1.0, 0.05, 0.0});
        CHECK(!rep.certified);
        CHECK(rep.verdict.rfind("inconclusive", 0) == 0);
    }
    SUBCASE("smaller amplitudes shrink the gaps quadratically") {
        const CounterexampleReport rep =
            verify_counterexample(CounterexampleParams{4.0, 0.025, 0.0});
        CHECK(rep.certified);
        const CounterexampleReport big = verify_counterexample(kDefault);
        const double ratio = big.excess_flat / rep.excess_flat;
        CHECK(ratio >= 3.8);
        CHECK(ratio <= 4.2);
    }
}
