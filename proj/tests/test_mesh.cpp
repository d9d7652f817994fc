// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <set>
#include <sstream>
#include <tuple>

#include <fmt/format.h>

#include "strainrom/error.hpp"
#include "support.hpp"

using namespace strainrom;
using namespace testing;

namespace {

ErrorKind build_error(int n, const std::vector<Pore>& pores, double L) {
  try {
    build_rve(n, pores, L);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::IoError;
}

// Voxel centroids inside a periodic image of any pore, counted directly.
int removed_by_centroid(int n, const std::vector<Pore>& pores, double L) {
  const double h = L / n;
  int removed = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const Eigen::Vector3d c((i + 0.5) * h, (j + 0.5) * h, (k + 0.5) * h);
        bool inside = false;
        for (const auto& p : pores)
          for (int a = -1; a <= 1; ++a)
            for (int b = -1; b <= 1; ++b)
              for (int e = -1; e <= 1; ++e)
                inside = inside || (c - p.center - L * Eigen::Vector3d(a, b, e)).norm() < p.radius;
        removed += inside;
      }
  return removed;
}

// Volume of a hexahedron with bilinear faces as (1/3) sum over faces of the
// integral of x . n dA, each face integrated with 2x2 Gauss points.
double hex_volume_by_faces(const std::array<Eigen::Vector3d, 8>& x) {
  static const int faces[6][4] = {{0, 3, 2, 1}, {4, 5, 6, 7}, {0, 1, 5, 4}, {3, 7, 6, 2}, {0, 4, 7, 3}, {1, 2, 6, 5}};
  const double gp[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
  double vol = 0.0;
  for (const auto& f : faces) {
    const Eigen::Vector3d &a = x[f[0]], &b = x[f[1]], &c = x[f[2]], &d = x[f[3]];
    for (double s : gp)
      for (double t : gp) {
        const Eigen::Vector3d p = (1 - s) * (1 - t) * a + s * (1 - t) * b + s * t * c + (1 - s) * t * d;
        const Eigen::Vector3d ps = (1 - t) * (b - a) + t * (c - d);
        const Eigen::Vector3d pt = (1 - s) * (d - a) + s * (c - b);
        vol += 0.25 * p.dot(ps.cross(pt)) / 3.0;
      }
  }
  return vol;
}

}  // namespace

TEST_CASE("solid cube counts") {
  const Mesh mesh = solid_cell(2, 2.0);
  CHECK(mesh.elements.size() == 8);
  CHECK(mesh.nodes.size() == 27);
  const GaussTable gauss = gauss_table(mesh);
  CHECK(gauss.size() == 64);
  CHECK(gauss.total_volume() == doctest::Approx(8.0).epsilon(1e-14));
  const PeriodicMap pm = periodic_pairs(mesh);
  CHECK(pm.n_classes == 8);
  CHECK(pm.independent_dofs() == 21);
}

TEST_CASE("single unit element quadrature") {
  Mesh mesh;
  mesh.edge_length = 1.0;
  mesh.n_voxels = 1;
  mesh.nodes = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
  mesh.elements = {{0, 1, 2, 3, 4, 5, 6, 7}};
  const GaussTable gauss = gauss_table(mesh);
  REQUIRE(gauss.size() == 8);
  for (const auto& gp : gauss.points) CHECK(gp.volume == doctest::Approx(0.125).epsilon(1e-15));
}

TEST_CASE("property: distorted element volume matches the divergence theorem") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-0.15, 0.15);
  for (int trial = 0; trial < 20; ++trial) {
    Mesh mesh;
    mesh.edge_length = 1.0;
    std::array<Eigen::Vector3d, 8> x{Eigen::Vector3d(0, 0, 0), {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                                     {0, 0, 1},                {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
    for (auto& p : x) p += Eigen::Vector3d(u(rng), u(rng), u(rng));
    mesh.nodes.assign(x.begin(), x.end());
    mesh.elements = {{0, 1, 2, 3, 4, 5, 6, 7}};
    const GaussTable gauss = gauss_table(mesh);
    CHECK(gauss.total_volume() == doctest::Approx(hex_volume_by_faces(x)).epsilon(1e-12));
    for (const auto& gp : gauss.points) CHECK(gp.volume > 0.0);
  }
}

TEST_CASE("property: shape functions partition unity with zero gradient sum") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::Matrix<double, 8, 1> N;
    Eigen::Matrix<double, 8, 3> dN;
    hex_shape(Eigen::Vector3d(u(rng), u(rng), u(rng)), N, dN);
    CHECK(N.sum() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(dN.colwise().sum().norm() < 1e-14);
  }
}

TEST_CASE("pore removal matches a direct centroid count") {
  const std::vector<Pore> centre{{Eigen::Vector3d(1, 1, 1), 0.667}};
  const Mesh one = build_rve(8, centre, 2.0);
  CHECK(static_cast<int>(one.elements.size()) == 512 - removed_by_centroid(8, centre, 2.0));

  const Mesh desk = desk_cell();
  const int expected = 512 - removed_by_centroid(8, default_pores(), 2.0);
  CHECK(static_cast<int>(desk.elements.size()) == expected);
  const GaussTable gauss = gauss_table(desk);
  const double voxel = std::pow(2.0 / 8, 3);
  CHECK(gauss.total_volume() == expected * voxel);
  for (const auto& gp : gauss.points) CHECK(gp.volume > 0.0);
}

TEST_CASE("periodic classes of the desk mesh match direct counting") {
  const Mesh mesh = desk_cell();
  const int n = mesh.n_voxels;
  const double h = mesh.edge_length / n;
  std::set<std::tuple<int, int, int>> classes;
  for (const auto& X : mesh.nodes) {
    auto wrap = [&](double c) { return static_cast<int>(std::lround(c / h)) % n; };
    classes.insert({wrap(X.x()), wrap(X.y()), wrap(X.z())});
  }
  const PeriodicMap pm = periodic_pairs(mesh);
  CHECK(pm.n_classes == static_cast<int>(classes.size()));
  CHECK(pm.independent_dofs() == 3 * (static_cast<int>(classes.size()) - 1));

  // Nodes sharing a class are translates of each other by multiples of L.
  std::vector<Eigen::Vector3d> first(pm.n_classes, Eigen::Vector3d::Constant(-1));
  for (std::size_t k = 0; k < mesh.nodes.size(); ++k) {
    const int c = pm.node_class[k];
    if (first[c].x() < 0) {
      first[c] = mesh.nodes[k];
      continue;
    }
    const Eigen::Vector3d diff = (mesh.nodes[k] - first[c]) / mesh.edge_length;
    CHECK((diff - diff.array().round().matrix()).norm() < 1e-12);
  }
}

TEST_CASE("geometry errors") {
  CHECK(build_error(2, {{Eigen::Vector3d(1, 1, 1), 5.0}}, 2.0) == ErrorKind::EmptyMatrix);

  // Two removed voxel layers split the torus into two slabs.
  std::vector<Pore> slabs;
  for (double x : {0.5, 2.5})
    for (double y : {0.5, 1.5, 2.5, 3.5})
      for (double z : {0.5, 1.5, 2.5, 3.5}) slabs.push_back({Eigen::Vector3d(x, y, z), 0.1});
  CHECK(build_error(4, slabs, 4.0) == ErrorKind::DisconnectedMatrix);
  // One layer leaves a slab that wraps around and stays connected.
  slabs.resize(16);
  CHECK_NOTHROW(build_rve(4, slabs, 4.0));

  Mesh bent = solid_cell(2, 2.0);
  for (auto& X : bent.nodes)
    if (X.x() == 0.0 && X.y() == 1.0 && X.z() == 1.0) X.y() += 0.1;
  try {
    periodic_pairs(bent);
    FAIL("expected UnmatchedBoundaryNode");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnmatchedBoundaryNode);
  }
}

TEST_CASE("hash and text export") {
  const Mesh a = porous_cell(), b = porous_cell();
  CHECK(mesh_hash(a) == mesh_hash(b));
  CHECK(mesh_hash(a) != mesh_hash(solid_cell(4, 2.0)));
  std::ostringstream out;
  write_mesh_text(a, out);
  const std::string text = out.str();
  CHECK(text.rfind("# strainrom mesh v1", 0) == 0);
  CHECK(text.find(fmt::format("nodes {}", a.nodes.size())) != std::string::npos);
  CHECK(text.find(fmt::format("elements {}", a.elements.size())) != std::string::npos);
}
