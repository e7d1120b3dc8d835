#ifndef MINIDISK_GEOMETRY_HPP
#define MINIDISK_GEOMETRY_HPP

#include <string>
#include <vector>

#include "minidisk/family.hpp"

namespace minidisk {

/// Triangulated immersed disk with vertex normals.
struct SurfaceMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<Vec3> normals;
};

/// Triangulate the solution grid (fan at the pole, quads split elsewhere).
SurfaceMesh build_surface_mesh(const DiskSolution& sol);

/// Edge-against-triangle self-intersection test with a uniform broad phase.
bool mesh_self_intersects(const SurfaceMesh& mesh);

/// Sum of triangle areas measured in the given metric (sampled at centroids).
double mesh_area(const SurfaceMesh& mesh, const MetricField& field);

/// max over vertices of A of the distance to the nearest vertex of B,
/// symmetrized.
double chamfer_distance(const SurfaceMesh& a, const SurfaceMesh& b);

/// Euclidean unit normal and unit x-tangent of the immersion at every node.
struct FrameFields {
    std::vector<Vec3> nu;  // unit normal
    std::vector<Vec3> h;   // unit tangent along the chart x-direction
};
FrameFields frame_fields(const DiskSolution& sol);

/// The rotation matrix of the unit quaternion a + bi + cj + dk acting by
/// conjugation on imaginary quaternions.
Mat3 quaternion_to_rotation(double a, double b, double c, double d);

/// Trace of the rotation with columns (nu, h, nu^h); equals 1 + 2cos(angle).
double trace_invariant(const Vec3& nu, const Vec3& h);

/// Minimum over boundary nodes of the trace of the relative rotation
/// (p, v, p^v)^T (nu, h, nu^h); values near -1 flag the antipodal cut locus.
double cut_locus_margin(const DiskSolution& sol);

/// Grid diffeomorphism of the disk, identity on the boundary.
struct DiskDiffeo {
    GridPtr grid;
    std::vector<Eigen::Vector2d> points;          // image of each node
    std::vector<Eigen::Vector2d> boundary_field;  // X at boundary nodes
    double r0 = 0.5;
    double min_jacobian = 0.0;

    const Eigen::Vector2d& at(int i, int j) const {
        return points[grid->node(i, j)];
    }
    /// d/dr of the map at a boundary node (analytic; equals X there).
    Eigen::Vector2d boundary_radial_deriv(int j) const {
        return boundary_field[j];
    }
};

/// The identity map as a DiskDiffeo (testing scaffold).
DiskDiffeo identity_diffeo(GridPtr grid);

/// Radial blend toward the boundary field X = DF^{-1}(rot_{-pi/2} dF/dtheta):
/// post-composition makes the immersion conformal along the boundary.
/// Throws std::runtime_error when <X, e_r> <= 0 somewhere or when no cutoff
/// radius yields a positive Jacobian.
DiskDiffeo boundary_conformalizing_diffeo(const DiskSolution& sol);

/// Angle plus stretch defect of d_r(F o Y) against d_theta(F o Y) over the
/// boundary nodes.
double conformal_defect(const DiskSolution& sol, const DiskDiffeo& y);

/// Same defect for synthetic immersions given by an analytic map (testing).
double conformal_defect_of_map(
    const std::function<Vec3(double, double)>& immersion,
    const std::function<Vec3(double, double)>& d_dx,
    const std::function<Vec3(double, double)>& d_dy, const DiskDiffeo& y);

struct ThreePointJacobianReport {
    Eigen::Matrix<double, 9, 9> analytic;
    double max_abs_diff = 0.0;       // against central differences
    double leading_form_err = 0.0;   // |M - sin(theta) M0(cot theta)|
    double inverse_err = 0.0;        // |sin(theta) M^-1 - N(cot theta)|
};

/// The 9x9 Jacobian of the three-point evaluation map of the flat family at
/// chart locations (1, i, -1), in the adapted frame bases, together with its
/// finite-difference and closed-form cross-checks.
ThreePointJacobianReport three_point_jacobian(const Vec3& p, const Vec3& v,
                                              double theta);

/// Leading-form matrix M0(c) and the closed-form inverse block N(c).
Eigen::Matrix<double, 9, 9> three_point_leading_form(double cot_theta);
Eigen::Matrix<double, 9, 9> three_point_leading_inverse(double cot_theta);

/// Plain-text Wavefront OBJ with 17 significant digits; deterministic order.
void export_obj(const SurfaceMesh& mesh, const std::string& path);
SurfaceMesh import_obj(const std::string& path);

}  // namespace minidisk

#endif
