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

#include "semisparse/mesh.h"

#include <cstdint>
#include <vector>

namespace semisparse {

enum class NoiseDirection {
  kRandom,  // i.i.d. per coordinate
  kNormal,  // along the area-weighted vertex normal
};

struct NoiseSpec {
  double sigma_rel = 0.0;  // standard deviation in units of the mean edge length
  NoiseDirection direction = NoiseDirection::kRandom;
  std::uint64_t seed = 0;
};

/// Zero-mean Gaussian vertex noise with standard deviation
/// sigma_rel * mean edge length. Deterministic for a given seed.
Mesh add_gaussian_noise(const Mesh& mesh, const NoiseSpec& spec);

/// Unit sum of incident face cross products (area-weighted vertex normal).
std::vector<Vec3> area_weighted_vertex_normals(const Mesh& mesh);

/// Per-face angle between two unit normal fields, in degrees.
std::vector<double> angular_differences(const Field3& normals, const Field3& reference);

/// Mean angle between corresponding rows, in degrees. Throws kLengthMismatch.
double mean_angular_difference(const Field3& normals, const Field3& reference);

/// Closest point of triangle (a, b, c) to p.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);
double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

/// Nearest-triangle queries against a fixed mesh. Meshes at or above
/// kBvhThreshold triangles are searched through a bounding-box hierarchy,
/// smaller ones by exhaustive scan.
class SurfaceDistance {
 public:
  static constexpr int kBvhThreshold = 50000;

  explicit SurfaceDistance(const Mesh& surface, bool force_bvh = false);

  double distance(const Vec3& p) const;
  bool uses_bvh() const { return !nodes_.empty(); }

 private:
  struct Node {
    Vec3 lo, hi;
    int left = -1, right = -1;  // children, or -1 for a leaf
    int begin = 0, end = 0;     // leaf range in order_
  };

  int build(int begin, int end);
  double box_distance2(const Node& node, const Vec3& p) const;
  double triangle_distance2(int t, const Vec3& p) const;

  std::vector<std::array<Vec3, 3>> triangles_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
};

/// Area-weighted RMS distance from the vertices of `denoised` to the surface
/// of `reference`:
///   sqrt(sum_i (sum_{M1(v_i)} s_tau) dist(v_i)^2 / (3 sum_tau s_tau)),
/// areas taken on `denoised`. Throws kEmptyMesh.
double vertex_error(const Mesh& denoised, const Mesh& reference);

}  // namespace semisparse
