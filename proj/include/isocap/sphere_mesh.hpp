#pragma once

#include <Eigen/Dense>

#include <array>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace isocap {

using Vec3 = Eigen::Vector3d;

class MeshDegeneracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Interior edge of the reference triangulation with its cotangent weight
// (cot alpha + cot beta)/2, alpha/beta the two opposite angles.
struct MeshEdge {
  int a = 0;
  int b = 0;  // a < b
  double weight = 0.0;
};

// Triangulated unit sphere obtained by 1-to-4 subdivision of the icosahedron.
// Immutable after construction; shared between surface maps.
struct SphereMesh {
  std::vector<Vec3> vertices;               // unit vectors
  std::vector<std::array<int, 3>> faces;    // outward winding (positive volume)
  std::vector<MeshEdge> edges;
  std::vector<double> dual_areas;           // barycentric dual areas
  std::vector<std::vector<int>> neighbors;  // one-rings, sorted
  std::vector<std::vector<int>> vertex_faces;
  std::vector<int> reflect_perm;            // vertex permutation of z -> -z
  int level = 0;

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int face_count() const { return static_cast<int>(faces.size()); }
  double reference_area() const;
};

// level <= 8; throws std::length_error beyond that.
std::shared_ptr<const SphereMesh> build_icosphere(int level);

// Piecewise-linear map u : S^2 -> R^3, stored per vertex.
struct SurfaceMap {
  std::shared_ptr<const SphereMesh> mesh;
  std::vector<Vec3> positions;

  const SphereMesh& ref() const { return *mesh; }
};

// Round sphere of signed volume t (radius (3|t|/4pi)^{1/3}), rescaled so the
// discrete volume equals t exactly. t = 0 is invalid.
SurfaceMap init_sphere(std::shared_ptr<const SphereMesh> mesh, double t,
                       const Vec3& center = Vec3::Zero());

// Moves vertices toward the area-weighted one-ring centroid inside their
// tangent plane, then restores the enclosed volume by an exact cube-root
// rescale about the area-weighted barycenter.
SurfaceMap tangential_smooth(const SurfaceMap& u, double strength);

// Composition with the orientation-reversing mesh symmetry: Dirichlet energy
// is preserved, volume changes sign. Involution.
SurfaceMap flip_orientation(const SurfaceMap& u);

void write_obj(const SurfaceMap& u, const std::string& path);

// Dual-area-weighted vertex average (the discrete stand-in for the
// mean-value normalization).
Vec3 weighted_centroid(const SurfaceMap& u);

// Signed volume of the polyhedral surface, (1/6) sum of triple products.
// Lives here so the mesh module can restore constraints without depending on
// the functionals module; functionals::volume forwards to it.
double enclosed_volume(const SurfaceMap& u);

// Exact constraint restoration: rescales about `about` by (t/volume)^{1/3}.
// Requires volume and t to have the same sign.
SurfaceMap rescale_to_volume(const SurfaceMap& u, double t, const Vec3& about);

// Minimum image triangle area; throws MeshDegeneracyError if any face is
// degenerate (area < 1e-14 x mean area).
void check_image_degeneracy(const SurfaceMap& u);

double min_triangle_angle(const SurfaceMap& u);

}  // namespace isocap
