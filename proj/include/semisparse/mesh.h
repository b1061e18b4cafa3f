// Copyright 2026 The semisparse Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <span>
#include <vector>

namespace semisparse {

using Vec3 = Eigen::Vector3d;

/// Per-element 3-vectors (face normals, edge jumps, line jumps), one row each.
using Field3 = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

inline constexpr int kNone = -1;

/// Relative orientation of an edge inside a counterclockwise face.
struct FaceEdge {
  int edge = kNone;
  int sign = 0;  // sgn(e, face), +1 or -1
};

/// Segment from a face barycenter to one of its corners.
///
/// `edge_in` enters the corner and `edge_out` leaves it when the owning face is
/// walked counterclockwise. `face_in` / `face_out` lie across those edges and
/// are kNone on the boundary.
struct Line {
  int face = kNone;
  int vertex = kNone;
  int edge_in = kNone;
  int edge_out = kNone;
  int face_in = kNone;
  int face_out = kNone;

  bool on_boundary() const { return face_in == kNone || face_out == kNone; }
};

/// Indexed triangle mesh with the topology tables used by the difference
/// operators. Immutable once built.
///
/// Edges are oriented from the lower to the higher vertex index. The line at
/// corner j of face f has index 3 * f + j.
class Mesh {
 public:
  /// Throws Error with kIndexOutOfRange, kDegenerateFace (repeated index),
  /// kNonManifoldEdge or kInconsistentOrientation.
  static Mesh build(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> faces);

  /// Same topology, new positions. Sizes must match.
  Mesh with_positions(std::vector<Vec3> positions) const;

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_faces() const { return static_cast<int>(faces_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_lines() const { return static_cast<int>(lines_.size()); }

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& faces() const { return faces_; }
  const std::vector<std::array<int, 2>>& edges() const { return edges_; }
  const std::vector<Line>& lines() const { return lines_; }

  /// Edge k of face f joins corners k and k+1.
  const std::array<FaceEdge, 3>& face_edges(int f) const { return face_edges_[f]; }
  /// One or two faces; the first is always present.
  const std::array<int, 2>& edge_faces(int e) const { return edge_faces_[e]; }
  bool is_boundary_edge(int e) const { return edge_faces_[e][1] == kNone; }

  // Neighborhoods. All throw kIndexOutOfRange on a bad index.

  /// D1(f): faces sharing an edge with f.
  std::vector<int> face_ring(int f) const;
  /// B1(f): the three lines owned by f.
  std::array<int, 3> face_lines(int f) const;
  /// B2(f): lines of the D1(f) faces whose corner vertex lies on f.
  std::vector<int> ring_lines(int f) const;
  /// B1(e): lines of the faces incident to e that touch an endpoint of e.
  std::vector<int> edge_lines(int e) const;
  /// M1(v): faces containing v.
  std::span<const int> vertex_faces(int v) const;
  /// N1(v): vertices adjacent to v.
  std::span<const int> vertex_neighbors(int v) const;

 private:
  Mesh() = default;
  void check_face(int f) const;

  std::vector<Vec3> vertices_;
  std::vector<std::array<int, 3>> faces_;
  std::vector<std::array<int, 2>> edges_;
  std::vector<std::array<FaceEdge, 3>> face_edges_;
  std::vector<std::array<int, 2>> edge_faces_;
  std::vector<Line> lines_;
  // CSR adjacency for M1 / N1.
  std::vector<int> vertex_face_offsets_, vertex_face_list_;
  std::vector<int> vertex_neighbor_offsets_, vertex_neighbor_list_;
};

/// Measured quantities of a mesh. All lengths in model units.
struct Geometry {
  Eigen::VectorXd face_area;
  Field3 face_normal;
  Field3 face_centroid;
  Eigen::VectorXd edge_length;
  Eigen::VectorXd line_length;
  double mean_edge_length = 0.0;
};

/// Throws kDegenerateFace when a face area falls below 1e-14 * diag^2, diag
/// being the bounding-box diagonal.
Geometry compute_geometry(const Mesh& mesh);

/// Unit counterclockwise face normals.
Field3 face_normals(const Mesh& mesh);

}  // namespace semisparse
