// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace strainrom {

struct Pore {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double radius = 0.0;
};

/// 8-node hexahedron, local node order
///   (0,0,0) (1,0,0) (1,1,0) (0,1,0) (0,0,1) (1,0,1) (1,1,1) (0,1,1).
using HexElement = std::array<int, 8>;

/// Periodic cube [0, L]^3 meshed with voxel hexahedra. Pores are voids.
struct Mesh {
  std::vector<Eigen::Vector3d> nodes;
  std::vector<HexElement> elements;
  double edge_length = 1.0;
  int n_voxels = 0;
  std::vector<Pore> pores;

  [[nodiscard]] double cell_volume() const noexcept { return edge_length * edge_length * edge_length; }
};

/// Voxel RVE: voxels whose centroid lies inside any periodic image of a pore
/// are removed. Nodes are kept whenever their periodic image is used by any
/// element, so opposite faces always carry matching node sets.
///
/// Throws EmptyMatrix if every voxel is removed and DisconnectedMatrix if the
/// remaining voxels are not face-connected on the periodic torus.
Mesh build_rve(int n_voxels, std::span<const Pore> pores, double edge_length);

/// Default desk geometry: L = 2 mm, 8 voxels per edge, two overlapping pores
/// of radius 0.667 mm.
std::vector<Pore> default_pores();

struct GaussPoint {
  Eigen::Vector3d X = Eigen::Vector3d::Zero();
  double volume = 0.0;
  Eigen::Matrix<double, 8, 3> dNdX = Eigen::Matrix<double, 8, 3>::Zero();
  int element = -1;
};

/// Full 2x2x2 Gauss quadrature; points are ordered element-major.
struct GaussTable {
  std::vector<GaussPoint> points;

  [[nodiscard]] std::size_t size() const noexcept { return points.size(); }
  [[nodiscard]] double total_volume() const;
  [[nodiscard]] Eigen::VectorXd volumes() const;
};

GaussTable gauss_table(const Mesh& mesh);

/// Trilinear shape functions and their natural derivatives at (xi, eta, zeta).
void hex_shape(const Eigen::Vector3d& natural, Eigen::Matrix<double, 8, 1>& N, Eigen::Matrix<double, 8, 3>& dN);

/// Node -> periodic equivalence class. Class `anchor_class` is pinned to
/// remove rigid translations.
struct PeriodicMap {
  std::vector<int> node_class;
  int n_classes = 0;
  int anchor_class = 0;

  /// Independent displacement DOFs once the anchor is removed.
  [[nodiscard]] int independent_dofs() const noexcept { return 3 * (n_classes - 1); }
  /// DOF index of component i of class c, or -1 for the anchor.
  [[nodiscard]] int dof(int cls, int i) const noexcept {
    if (cls == anchor_class) return -1;
    return 3 * (cls < anchor_class ? cls : cls - 1) + i;
  }
};

/// Pairs nodes on opposite faces, edges and corners (tolerance 1e-9 L).
/// Throws UnmatchedBoundaryNode when a node on a face has no partner on the
/// opposite face.
PeriodicMap periodic_pairs(const Mesh& mesh);

/// FNV-1a hash over geometry and connectivity; used to tie stores and models
/// to the mesh they were built on.
std::uint64_t mesh_hash(const Mesh& mesh);

/// Plain text export:
///   # strainrom mesh v1
///   edge_length <L>
///   nodes <N>            followed by N lines "x y z"
///   elements <E>         followed by E lines of 8 node indices
void write_mesh_text(const Mesh& mesh, std::ostream& out);

}  // namespace strainrom
