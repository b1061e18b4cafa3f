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

#include <vector>

namespace semisparse {

inline constexpr int kDefaultVertexIterations = 35;

struct VertexUpdateResult {
  std::vector<Vec3> positions;
  /// Faces whose final normal points against the target normal.
  int flipped_faces = 0;
  /// Orthogonality residual before the first sweep and after each sweep.
  std::vector<double> residuals;
};

/// Sum over faces of s_tau * sum over the three edges of (N_tau . (vi - vj))^2,
/// with areas taken from `positions`.
double orthogonality_residual(const Mesh& mesh, const Field3& normals,
                              const std::vector<Vec3>& positions);

/// Moves every vertex toward the planes through its incident face centroids
/// with the target normals:
///   v <- v + (1 / |M1(v)|) sum_{tau in M1(v)} N_tau (N_tau . (c_tau - v)).
/// All vertices of a sweep read the previous sweep's positions.
VertexUpdateResult update_vertices(const Mesh& mesh, const Field3& normals,
                                   int iterations = kDefaultVertexIterations);

}  // namespace semisparse
