#ifndef MINIDISK_GRID_HPP
#define MINIDISK_GRID_HPP

#include <memory>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace minidisk {

/// Tensor polar grid on the closed unit disk. Radii i/N_r for i = 0..N_r,
/// angles 2*pi*j/N_theta. The pole is a single node; the outermost ring is
/// the Dirichlet boundary.
class DiskGrid {
public:
    DiskGrid(int n_r, int n_theta);

    int nr() const { return nr_; }
    int ntheta() const { return nt_; }
    double dr() const { return dr_; }
    double dtheta() const { return dt_; }

    int n_nodes() const { return 1 + nr_ * nt_; }
    int n_interior() const { return (nr_ - 1) * nt_; }
    int n_boundary() const { return nt_; }
    int n_unknowns() const { return 1 + n_interior(); }

    /// Node index; i = 0 collapses to the pole for every j.
    int node(int i, int j) const {
        if (i == 0) return 0;
        return 1 + (i - 1) * nt_ + wrap(j);
    }
    /// Unknown index (pole + interior nodes); boundary nodes are not unknowns.
    int unknown(int i, int j) const {
        if (i == 0) return 0;
        return 1 + (i - 1) * nt_ + wrap(j);
    }

    bool is_pole(int i) const { return i == 0; }
    bool is_boundary(int i) const { return i == nr_; }
    bool is_interior(int i) const { return i > 0 && i < nr_; }

    double radius(int i) const { return i * dr_; }
    double theta(int j) const { return wrap(j) * dt_; }
    double cos_theta(int j) const { return cos_[wrap(j)]; }
    double sin_theta(int j) const { return sin_[wrap(j)]; }

    int wrap(int j) const {
        j %= nt_;
        return j < 0 ? j + nt_ : j;
    }

private:
    int nr_, nt_;
    double dr_, dt_;
    std::vector<double> cos_, sin_;
};

using GridPtr = std::shared_ptr<const DiskGrid>;

GridPtr build_grid(int n_r, int n_theta);

/// Nodal height values over a disk grid with zero boundary trace.
struct GraphFunction {
    GridPtr grid;
    Eigen::VectorXd values;  // indexed by DiskGrid::node

    GraphFunction() = default;
    explicit GraphFunction(GridPtr g)
        : grid(std::move(g)), values(Eigen::VectorXd::Zero(grid->n_nodes())) {}

    double at(int i, int j) const { return values[grid->node(i, j)]; }
    double& at(int i, int j) { return values[grid->node(i, j)]; }
    double pole() const { return values[0]; }

    void enforce_boundary_zero();
    bool boundary_is_zero(double tol = 0.0) const;
    double max_abs() const { return values.cwiseAbs().maxCoeff(); }
};

/// Polar first and second derivatives at one interior node (centered
/// second-order stencils; the radial neighbor at i-1 = 0 is the pole).
struct PolarDerivs {
    double w, wr, wt, wrr, wrt, wtt;
};

/// Cartesian derivatives at a grid node.
struct CartDerivs {
    double w, wx, wy, wxx, wxy, wyy;
};

PolarDerivs polar_derivs_interior(const GraphFunction& w, int i, int j);
CartDerivs cart_from_polar(const PolarDerivs& pd, double r, double cos_t,
                           double sin_t);
CartDerivs cart_derivs_interior(const GraphFunction& w, int i, int j);

/// First derivatives (w_r, w_theta) at every node: centered in the interior,
/// one-sided second order on the boundary ring, zero at the pole row.
struct NodalFirstDerivs {
    Eigen::VectorXd wr, wt;
};
NodalFirstDerivs nodal_first_derivs(const GraphFunction& w);

/// Cartesian gradient (w_x, w_y) at the pole from the first two rings.
Eigen::Vector2d pole_gradient(const GraphFunction& w);

/// Smooth global interpolant: Fourier in theta, C^2 cubic splines in r.
/// Evaluation is well defined on the closed disk (clamped to r <= 1).
class DiskInterpolant {
public:
    DiskInterpolant() = default;
    explicit DiskInterpolant(const GraphFunction& w);

    double value(double x, double y) const;
    /// value and Cartesian gradient
    void value_grad(double x, double y, double* w, double* wx, double* wy) const;

private:
    struct Spline {
        // per-interval cubics in local coordinate xi = r - r_i
        Eigen::VectorXd c0, c1, c2, c3;
        double h = 0.0;
        int n = 0;
        void build(const Eigen::VectorXd& f, double h, int left_kind);
        double eval(double r, double* deriv) const;
        // f(r)/r on the first interval without cancellation (requires f(0)=0)
        double eval_over_r(double r) const;
    };
    int nt_ = 0, kmax_ = 0;
    std::vector<Spline> acos_, bsin_;
};

}  // namespace minidisk

#endif
