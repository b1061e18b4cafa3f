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

#include "semisparse/vertex_update.h"

#include "semisparse/error.h"

namespace semisparse {

namespace {

Vec3 centroid(const Mesh& mesh, const std::vector<Vec3>& x, int f) {
  const auto& t = mesh.faces()[f];
  return (x[t[0]] + x[t[1]] + x[t[2]]) / 3.0;
}

}  // namespace

double orthogonality_residual(const Mesh& mesh, const Field3& normals,
                              const std::vector<Vec3>& positions) {
  double total = 0.0;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const auto& t = mesh.faces()[f];
    const Vec3 n = normals.row(f).transpose();
    const double area =
        0.5 * (positions[t[1]] - positions[t[0]]).cross(positions[t[2]] - positions[t[0]]).norm();
    double sum = 0.0;
    for (int k = 0; k < 3; ++k) {
      const double d = n.dot(positions[t[k]] - positions[t[(k + 1) % 3]]);
      sum += d * d;
    }
    total += area * sum;
  }
  return total;
}

VertexUpdateResult update_vertices(const Mesh& mesh, const Field3& normals, int iterations) {
  if (normals.rows() != mesh.num_faces()) {
    throw Error(ErrorCode::kLengthMismatch, "expected one normal per face");
  }
  if (iterations < 0) throw Error(ErrorCode::kInvalidArgument, "iterations must be >= 0");

  VertexUpdateResult result;
  result.positions = mesh.vertices();
  result.residuals.push_back(orthogonality_residual(mesh, normals, result.positions));
  std::vector<Vec3> next(result.positions.size());
  for (int it = 0; it < iterations; ++it) {
    const std::vector<Vec3>& x = result.positions;
#pragma omp parallel for schedule(static)
    for (int v = 0; v < mesh.num_vertices(); ++v) {
      const auto faces = mesh.vertex_faces(v);
      if (faces.empty()) {
        next[v] = x[v];
        continue;
      }
      Vec3 step = Vec3::Zero();
      for (int f : faces) {
        const Vec3 n = normals.row(f).transpose();
        step += n * n.dot(centroid(mesh, x, f) - x[v]);
      }
      next[v] = x[v] + step / static_cast<double>(faces.size());
    }
    result.positions.swap(next);
    result.residuals.push_back(orthogonality_residual(mesh, normals, result.positions));
  }

  for (int f = 0; f < mesh.num_faces(); ++f) {
    const auto& t = mesh.faces()[f];
    const auto& x = result.positions;
    const Vec3 n = (x[t[1]] - x[t[0]]).cross(x[t[2]] - x[t[0]]);
    if (n.dot(normals.row(f).transpose()) < 0.0) ++result.flipped_faces;
  }
  return result;
}

}  // namespace semisparse
