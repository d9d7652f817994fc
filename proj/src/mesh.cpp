// SPDX-License-Identifier: Apache-2.0
#include "strainrom/mesh.hpp"

#include <cmath>
#include <map>
#include <ostream>
#include <queue>
#include <set>
#include <tuple>

#include <fmt/format.h>

#include "strainrom/error.hpp"

namespace strainrom {

namespace {

constexpr std::array<std::array<int, 3>, 8> kCorner = {{
    {0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}}};

double periodic_distance(const Eigen::Vector3d& a, const Eigen::Vector3d& b, double L) {
  Eigen::Vector3d d = a - b;
  for (int k = 0; k < 3; ++k) d(k) -= L * std::round(d(k) / L);
  return d.norm();
}

}  // namespace

std::vector<Pore> default_pores() {
  return {Pore{Eigen::Vector3d(0.6, 0.6, 0.6), 0.667}, Pore{Eigen::Vector3d(1.4, 1.2, 1.0), 0.667}};
}

Mesh build_rve(int n, std::span<const Pore> pores, double L) {
  if (n < 2) raise(ErrorKind::ConfigError, fmt::format("n_voxels must be >= 2, got {}", n));
  if (!(L > 0.0)) raise(ErrorKind::ConfigError, "edge length must be positive");

  const double h = L / n;
  auto voxel_id = [n](int i, int j, int k) { return (k * n + j) * n + i; };
  std::vector<char> solid(static_cast<std::size_t>(n) * n * n, 1);
  int n_solid = 0;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const Eigen::Vector3d c((i + 0.5) * h, (j + 0.5) * h, (k + 0.5) * h);
        bool inside = false;
        for (const auto& p : pores) inside = inside || periodic_distance(c, p.center, L) < p.radius;
        solid[voxel_id(i, j, k)] = inside ? 0 : 1;
        n_solid += inside ? 0 : 1;
      }
  if (n_solid == 0) raise(ErrorKind::EmptyMatrix, "all voxels lie inside pores");

  // Face connectivity on the periodic torus.
  {
    std::vector<char> seen(solid.size(), 0);
    int start = 0;
    while (!solid[start]) ++start;
    std::queue<int> queue;
    queue.push(start);
    seen[start] = 1;
    int reached = 1;
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop();
      const int i = v % n, j = (v / n) % n, k = v / (n * n);
      const int nb[6][3] = {{i + 1, j, k}, {i - 1, j, k}, {i, j + 1, k}, {i, j - 1, k}, {i, j, k + 1}, {i, j, k - 1}};
      for (const auto& q : nb) {
        const int w = voxel_id((q[0] + n) % n, (q[1] + n) % n, (q[2] + n) % n);
        if (solid[w] && !seen[w]) {
          seen[w] = 1;
          ++reached;
          queue.push(w);
        }
      }
    }
    if (reached != n_solid)
      raise(ErrorKind::DisconnectedMatrix,
            fmt::format("{} of {} matrix voxels are not face-connected", n_solid - reached, n_solid));
  }

  // A lattice node (i,j,k), 0 <= i,j,k <= n, is kept if its periodic class
  // touches a solid voxel.
  const int np = n + 1;
  std::vector<char> class_used(static_cast<std::size_t>(n) * n * n, 0);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        if (!solid[voxel_id(i, j, k)]) continue;
        for (const auto& c : kCorner)
          class_used[voxel_id((i + c[0]) % n, (j + c[1]) % n, (k + c[2]) % n)] = 1;
      }

  Mesh mesh;
  mesh.edge_length = L;
  mesh.n_voxels = n;
  mesh.pores.assign(pores.begin(), pores.end());
  std::vector<int> node_index(static_cast<std::size_t>(np) * np * np, -1);
  for (int k = 0; k < np; ++k)
    for (int j = 0; j < np; ++j)
      for (int i = 0; i < np; ++i) {
        if (!class_used[voxel_id(i % n, j % n, k % n)]) continue;
        node_index[(k * np + j) * np + i] = static_cast<int>(mesh.nodes.size());
        mesh.nodes.emplace_back(i * h, j * h, k * h);
      }
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        if (!solid[voxel_id(i, j, k)]) continue;
        HexElement e{};
        for (int a = 0; a < 8; ++a)
          e[a] = node_index[((k + kCorner[a][2]) * np + (j + kCorner[a][1])) * np + (i + kCorner[a][0])];
        mesh.elements.push_back(e);
      }
  return mesh;
}

void hex_shape(const Eigen::Vector3d& xi, Eigen::Matrix<double, 8, 1>& N, Eigen::Matrix<double, 8, 3>& dN) {
  for (int a = 0; a < 8; ++a) {
    const double s0 = 2.0 * kCorner[a][0] - 1.0, s1 = 2.0 * kCorner[a][1] - 1.0, s2 = 2.0 * kCorner[a][2] - 1.0;
    const double f0 = 1.0 + s0 * xi(0), f1 = 1.0 + s1 * xi(1), f2 = 1.0 + s2 * xi(2);
    N(a) = 0.125 * f0 * f1 * f2;
    dN(a, 0) = 0.125 * s0 * f1 * f2;
    dN(a, 1) = 0.125 * f0 * s1 * f2;
    dN(a, 2) = 0.125 * f0 * f1 * s2;
  }
}

GaussTable gauss_table(const Mesh& mesh) {
  const double gp = 1.0 / std::sqrt(3.0);
  GaussTable table;
  table.points.reserve(mesh.elements.size() * 8);
  Eigen::Matrix<double, 8, 1> N;
  Eigen::Matrix<double, 8, 3> dN;
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    Eigen::Matrix<double, 8, 3> X;
    for (int a = 0; a < 8; ++a) X.row(a) = mesh.nodes[mesh.elements[e][a]].transpose();
    for (int q = 0; q < 8; ++q) {
      const Eigen::Vector3d xi(kCorner[q][0] ? gp : -gp, kCorner[q][1] ? gp : -gp, kCorner[q][2] ? gp : -gp);
      hex_shape(xi, N, dN);
      const Eigen::Matrix3d J = X.transpose() * dN;  // J_ij = dX_i / dxi_j
      const double detJ = J.determinant();
      if (!(detJ > 0.0))
        raise(ErrorKind::NonPositiveJacobian, fmt::format("element {} has reference Jacobian {:.3g}", e, detJ));
      GaussPoint p;
      p.X = X.transpose() * N;
      p.volume = detJ;  // unit weights for 2-point Gauss
      p.dNdX = dN * J.inverse();
      p.element = static_cast<int>(e);
      table.points.push_back(p);
    }
  }
  return table;
}

double GaussTable::total_volume() const {
  double v = 0.0;
  for (const auto& p : points) v += p.volume;
  return v;
}

Eigen::VectorXd GaussTable::volumes() const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(points.size()));
  for (std::size_t g = 0; g < points.size(); ++g) v(static_cast<Eigen::Index>(g)) = points[g].volume;
  return v;
}

PeriodicMap periodic_pairs(const Mesh& mesh) {
  const double L = mesh.edge_length;
  const double tol = 1e-9 * L;
  using Key = std::array<long long, 3>;
  auto quantize = [tol](double x) { return std::llround(x / tol); };

  std::set<Key> positions;
  for (const auto& x : mesh.nodes) positions.insert({quantize(x(0)), quantize(x(1)), quantize(x(2))});

  // Every node on a face needs its translated partner on the opposite face.
  for (std::size_t a = 0; a < mesh.nodes.size(); ++a) {
    const auto& x = mesh.nodes[a];
    for (int k = 0; k < 3; ++k) {
      double shift = 0.0;
      if (std::abs(x(k)) < tol) shift = L;
      else if (std::abs(x(k) - L) < tol) shift = -L;
      else continue;
      Eigen::Vector3d y = x;
      y(k) += shift;
      if (!positions.count({quantize(y(0)), quantize(y(1)), quantize(y(2))}))
        raise(ErrorKind::UnmatchedBoundaryNode,
              fmt::format("node {} at ({:.6g}, {:.6g}, {:.6g}) has no partner across axis {}", a, x(0), x(1), x(2), k));
    }
  }

  PeriodicMap map;
  map.node_class.resize(mesh.nodes.size());
  std::map<Key, int> classes;
  for (std::size_t a = 0; a < mesh.nodes.size(); ++a) {
    Key key{};
    for (int k = 0; k < 3; ++k) {
      double w = mesh.nodes[a](k);
      if (std::abs(w - L) < tol) w = 0.0;
      key[k] = quantize(w);
    }
    auto [it, inserted] = classes.emplace(key, map.n_classes);
    if (inserted) ++map.n_classes;
    map.node_class[a] = it->second;
  }
  map.anchor_class = 0;
  return map;
}

std::uint64_t mesh_hash(const Mesh& mesh) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* data, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ULL;
    }
  };
  mix(&mesh.edge_length, sizeof(double));
  for (const auto& x : mesh.nodes) mix(x.data(), 3 * sizeof(double));
  for (const auto& e : mesh.elements) mix(e.data(), 8 * sizeof(int));
  return h;
}

void write_mesh_text(const Mesh& mesh, std::ostream& out) {
  out << "# strainrom mesh v1\n";
  out << fmt::format("edge_length {:.17g}\n", mesh.edge_length);
  out << "nodes " << mesh.nodes.size() << '\n';
  for (const auto& x : mesh.nodes) out << fmt::format("{:.17g} {:.17g} {:.17g}\n", x(0), x(1), x(2));
  out << "elements " << mesh.elements.size() << '\n';
  for (const auto& e : mesh.elements)
    out << fmt::format("{} {} {} {} {} {} {} {}\n", e[0], e[1], e[2], e[3], e[4], e[5], e[6], e[7]);
}

}  // namespace strainrom
