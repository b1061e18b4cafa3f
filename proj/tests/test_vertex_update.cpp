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


#include "doctest.h"
#include "semisparse/metrics.h"
#include "semisparse/shapes.h"
#include "semisparse/vertex_update.h"

#include <cmath>

using namespace semisparse;

namespace {

double brute_residual(const Mesh& m, const Field3& n, const std::vector<Vec3>& x) {
  double total = 0.0;
  for (int f = 0; f < m.num_faces(); ++f) {
    const auto& t = m.faces()[f];
    const double area = 0.5 * (x[t[1]] - x[t[0]]).cross(x[t[2]] - x[t[0]]).norm();
    const Vec3 nf = n.row(f).transpose();
    double s = 0.0;
    for (int k = 0; k < 3; ++k) {
      const double d = nf.dot(x[t[k]] - x[t[(k + 1) % 3]]);
      s += d * d;
    }
    total += area * s;
  }
  return total;
}

}  // namespace

TEST_CASE("zero sweeps is the identity") {
  const Mesh m = add_gaussian_noise(shapes::cube_grid(4), {0.2, NoiseDirection::kRandom, 1});
  const VertexUpdateResult r = update_vertices(m, face_normals(shapes::cube_grid(4)), 0);
  CHECK(r.positions == m.vertices());
  CHECK(r.residuals.size() == 1);
}

TEST_CASE("planar mesh with its own normal does not move") {
  const Mesh m = shapes::planar_grid(5);
  const VertexUpdateResult r = update_vertices(m, face_normals(m));
  for (int i = 0; i < m.num_vertices(); ++i) CHECK((r.positions[i] - m.vertices()[i]).norm() <= 1e-12);
  CHECK(r.residuals.back() <= 1e-24);
  CHECK(r.flipped_faces == 0);
}

TEST_CASE("residual matches a direct summation") {
  const Mesh m = add_gaussian_noise(shapes::icosphere(2), {0.1, NoiseDirection::kRandom, 2});
  const Field3 n = face_normals(shapes::icosphere(2));
  CHECK(orthogonality_residual(m, n, m.vertices()) ==
        doctest::Approx(brute_residual(m, n, m.vertices())).epsilon(1e-13));
}

TEST_CASE("sweeps toward ground-truth normals reduce both residual and vertex error") {
  const Mesh clean = shapes::cube_grid(8);
  const Mesh noisy = add_gaussian_noise(clean, {0.2, NoiseDirection::kRandom, 3});
  const Field3 truth = face_normals(clean);
  const VertexUpdateResult r = update_vertices(noisy, truth);
  REQUIRE(r.residuals.size() == kDefaultVertexIterations + 1);
  CHECK(r.residuals[0] == doctest::Approx(orthogonality_residual(noisy, truth, noisy.vertices())));
  for (std::size_t i = 1; i < r.residuals.size(); ++i) CHECK(r.residuals[i] < r.residuals[i - 1]);
  CHECK(r.residuals.back() == doctest::Approx(orthogonality_residual(noisy, truth, r.positions)));
  const Mesh updated = noisy.with_positions(r.positions);
  CHECK(vertex_error(updated, clean) < vertex_error(noisy, clean));
  CHECK(r.flipped_faces <= update_vertices(noisy, truth, 0).flipped_faces);
}

TEST_CASE("flipped faces are counted") {
  const Mesh m = shapes::unit_cube();
  const Field3 reversed = -face_normals(m);
  const VertexUpdateResult r = update_vertices(m, reversed, 0);
  CHECK(r.flipped_faces == m.num_faces());
}
