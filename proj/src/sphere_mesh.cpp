#include "isocap/sphere_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numbers>

namespace isocap {

namespace {

constexpr double kCotClamp = 1e6;

struct IcosahedronTable {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
  std::vector<int> reflect_perm;
};

IcosahedronTable icosahedron() {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  IcosahedronTable ico;
  ico.vertices = {
      {-1, t, 0},  {1, t, 0},  {-1, -t, 0}, {1, -t, 0},
      {0, -1, t},  {0, 1, t},  {0, -1, -t}, {0, 1, -t},
      {t, 0, -1},  {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
  for (auto& v : ico.vertices) v.normalize();
  ico.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
               {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
               {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
               {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  // z -> -z permutes the vertex set: 4<->6, 5<->7, 8<->9, 10<->11.
  ico.reflect_perm = {0, 1, 2, 3, 6, 7, 4, 5, 9, 8, 11, 10};
  return ico;
}

uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<uint64_t>(a) << 32) | static_cast<uint64_t>(b);
}

double triangle_area(const Vec3& p0, const Vec3& p1, const Vec3& p2) {
  return 0.5 * (p1 - p0).cross(p2 - p0).norm();
}

}  // namespace

double SphereMesh::reference_area() const {
  double total = 0.0;
  for (const auto& f : faces)
    total += triangle_area(vertices[f[0]], vertices[f[1]], vertices[f[2]]);
  return total;
}

std::shared_ptr<const SphereMesh> build_icosphere(int level) {
  if (level < 0) throw std::invalid_argument("build_icosphere: level < 0");
  if (level > 8)
    throw std::length_error("build_icosphere: level > 8 exceeds resource guard");

  IcosahedronTable ico = icosahedron();
  std::vector<Vec3> verts = ico.vertices;
  std::vector<std::array<int, 3>> faces = ico.faces;
  std::vector<int> perm = ico.reflect_perm;

  for (int l = 0; l < level; ++l) {
    std::map<uint64_t, int> midpoint;
    auto mid = [&](int a, int b) {
      auto it = midpoint.find(edge_key(a, b));
      if (it != midpoint.end()) return it->second;
      Vec3 m = (verts[a] + verts[b]).normalized();
      int idx = static_cast<int>(verts.size());
      verts.push_back(m);
      midpoint.emplace(edge_key(a, b), idx);
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      int a = mid(f[0], f[1]);
      int b = mid(f[1], f[2]);
      int c = mid(f[2], f[0]);
      next.push_back({f[0], a, c});
      next.push_back({f[1], b, a});
      next.push_back({f[2], c, b});
      next.push_back({a, b, c});
    }
    faces = std::move(next);
    // The reflection symmetry maps edges to edges, so it extends to the
    // midpoint vertices through the cache.
    perm.resize(verts.size(), -1);
    for (const auto& [key, m] : midpoint) {
      int a = static_cast<int>(key >> 32);
      int b = static_cast<int>(key & 0xffffffffu);
      perm[m] = midpoint.at(edge_key(perm[a], perm[b]));
    }
  }

  auto mesh = std::make_shared<SphereMesh>();
  mesh->level = level;
  mesh->vertices = std::move(verts);
  mesh->faces = std::move(faces);
  mesh->reflect_perm = std::move(perm);

  const int nv = mesh->vertex_count();
  mesh->dual_areas.assign(nv, 0.0);
  mesh->neighbors.assign(nv, {});
  mesh->vertex_faces.assign(nv, {});

  std::map<uint64_t, double> weight;
  for (int fi = 0; fi < mesh->face_count(); ++fi) {
    const auto& f = mesh->faces[fi];
    const Vec3& p0 = mesh->vertices[f[0]];
    const Vec3& p1 = mesh->vertices[f[1]];
    const Vec3& p2 = mesh->vertices[f[2]];
    double a2 = 2.0 * triangle_area(p0, p1, p2);
    for (int c = 0; c < 3; ++c) {
      int i = f[c], j = f[(c + 1) % 3], k = f[(c + 2) % 3];
      // cotangent of the angle at i, opposite edge (j,k)
      const Vec3 e1 = mesh->vertices[j] - mesh->vertices[i];
      const Vec3 e2 = mesh->vertices[k] - mesh->vertices[i];
      double cot = e1.dot(e2) / a2;
      cot = std::clamp(cot, -kCotClamp, kCotClamp);
      weight[edge_key(j, k)] += 0.5 * cot;
      mesh->dual_areas[f[c]] += a2 / 6.0;
      mesh->vertex_faces[f[c]].push_back(fi);
    }
  }
  mesh->edges.reserve(weight.size());
  for (const auto& [key, w] : weight) {
    MeshEdge e;
    e.a = static_cast<int>(key >> 32);
    e.b = static_cast<int>(key & 0xffffffffu);
    e.weight = w;
    mesh->edges.push_back(e);
    mesh->neighbors[e.a].push_back(e.b);
    mesh->neighbors[e.b].push_back(e.a);
  }
  for (auto& ring : mesh->neighbors) std::sort(ring.begin(), ring.end());
  return mesh;
}

double enclosed_volume(const SurfaceMap& u) {
  double v = 0.0;
  for (const auto& f : u.ref().faces) {
    const Vec3& a = u.positions[f[0]];
    const Vec3& b = u.positions[f[1]];
    const Vec3& c = u.positions[f[2]];
    v += a.dot(b.cross(c));
  }
  return v / 6.0;
}

Vec3 weighted_centroid(const SurfaceMap& u) {
  Vec3 c = Vec3::Zero();
  double total = 0.0;
  const auto& m = u.ref();
  for (int i = 0; i < m.vertex_count(); ++i) {
    c += m.dual_areas[i] * u.positions[i];
    total += m.dual_areas[i];
  }
  return c / total;
}

SurfaceMap rescale_to_volume(const SurfaceMap& u, double t, const Vec3& about) {
  double v = enclosed_volume(u);
  if (v == 0.0 || (v > 0) != (t > 0))
    throw std::invalid_argument("rescale_to_volume: volume/target sign mismatch");
  double tau = std::cbrt(t / v);
  SurfaceMap out = u;
  for (auto& p : out.positions) p = about + tau * (p - about);
  return out;
}

SurfaceMap init_sphere(std::shared_ptr<const SphereMesh> mesh, double t,
                       const Vec3& center) {
  if (t == 0.0) throw std::invalid_argument("init_sphere: t = 0");
  double r = std::cbrt(3.0 * std::abs(t) / (4.0 * std::numbers::pi));
  SurfaceMap u;
  u.mesh = mesh;
  u.positions.resize(mesh->vertex_count());
  for (int i = 0; i < mesh->vertex_count(); ++i)
    u.positions[i] = center + r * mesh->vertices[i];
  if (t < 0.0) u = flip_orientation(u);
  return rescale_to_volume(u, t, center);
}

SurfaceMap flip_orientation(const SurfaceMap& u) {
  SurfaceMap out;
  out.mesh = u.mesh;
  out.positions.resize(u.positions.size());
  const auto& perm = u.ref().reflect_perm;
  for (size_t i = 0; i < u.positions.size(); ++i)
    out.positions[i] = u.positions[perm[i]];
  return out;
}

void check_image_degeneracy(const SurfaceMap& u) {
  const auto& m = u.ref();
  std::vector<double> areas(m.face_count());
  double mean = 0.0;
  for (int fi = 0; fi < m.face_count(); ++fi) {
    const auto& f = m.faces[fi];
    areas[fi] =
        triangle_area(u.positions[f[0]], u.positions[f[1]], u.positions[f[2]]);
    mean += areas[fi];
  }
  mean /= m.face_count();
  for (double a : areas)
    if (a < 1e-14 * mean)
      throw MeshDegeneracyError("degenerate image triangle");
}

SurfaceMap tangential_smooth(const SurfaceMap& u, double strength) {
  if (!std::isfinite(strength))
    throw std::invalid_argument("tangential_smooth: non-finite strength");
  check_image_degeneracy(u);
  if (strength == 0.0) return u;

  const auto& m = u.ref();
  const int nv = m.vertex_count();

  // image vertex areas and area-vector normals
  std::vector<double> varea(nv, 0.0);
  std::vector<Vec3> vnormal(nv, Vec3::Zero());
  for (const auto& f : m.faces) {
    const Vec3& a = u.positions[f[0]];
    const Vec3& b = u.positions[f[1]];
    const Vec3& c = u.positions[f[2]];
    Vec3 av = 0.5 * (b - a).cross(c - a);
    double ar = av.norm();
    for (int j : f) {
      varea[j] += ar / 3.0;
      vnormal[j] += av;
    }
  }

  double target = enclosed_volume(u);
  SurfaceMap out = u;
  for (int i = 0; i < nv; ++i) {
    Vec3 centroid = Vec3::Zero();
    double wsum = 0.0;
    for (int j : m.neighbors[i]) {
      centroid += varea[j] * u.positions[j];
      wsum += varea[j];
    }
    centroid /= wsum;
    Vec3 disp = centroid - u.positions[i];
    double nn = vnormal[i].norm();
    if (nn > 0.0) {
      Vec3 n = vnormal[i] / nn;
      disp -= disp.dot(n) * n;
    }
    out.positions[i] = u.positions[i] + strength * disp;
  }
  return rescale_to_volume(out, target, weighted_centroid(out));
}

void write_obj(const SurfaceMap& u, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_obj: cannot open " + path);
  os.precision(17);
  for (const auto& p : u.positions)
    os << "v " << p.x() << " " << p.y() << " " << p.z() << "\n";
  for (const auto& f : u.ref().faces)
    os << "f " << f[0] + 1 << " " << f[1] + 1 << " " << f[2] + 1 << "\n";
}

double min_triangle_angle(const SurfaceMap& u) {
  double best = std::numbers::pi;
  for (const auto& f : u.ref().faces) {
    for (int c = 0; c < 3; ++c) {
      const Vec3& p = u.positions[f[c]];
      Vec3 e1 = u.positions[f[(c + 1) % 3]] - p;
      Vec3 e2 = u.positions[f[(c + 2) % 3]] - p;
      double cosang = e1.dot(e2) / (e1.norm() * e2.norm());
      best = std::min(best, std::acos(std::clamp(cosang, -1.0, 1.0)));
    }
  }
  return best;
}

}  // namespace isocap
