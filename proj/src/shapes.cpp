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

#include "semisparse/shapes.h"

#include "semisparse/error.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <unordered_map>

namespace semisparse::shapes {

namespace {

// Integer lattice points of a subdivided cube and its outward triangles.
struct Lattice {
  std::vector<std::array<int, 3>> points;
  std::vector<std::array<int, 3>> faces;
};

Lattice cube_lattice(int n) {
  Lattice lat;
  std::map<std::array<int, 3>, int> index;
  auto vertex = [&](const std::array<int, 3>& c) {
    auto [it, inserted] = index.try_emplace(c, static_cast<int>(lat.points.size()));
    if (inserted) lat.points.push_back(c);
    return it->second;
  };
  for (int a = 0; a < 3; ++a) {
    const int u = (a + 1) % 3, v = (a + 2) % 3;
    for (int side : {0, n}) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          auto at = [&](int di, int dj) {
            std::array<int, 3> c{};
            c[a] = side;
            c[u] = i + di;
            c[v] = j + dj;
            return vertex(c);
          };
          const int q0 = at(0, 0), q1 = at(1, 0), q2 = at(1, 1), q3 = at(0, 1);
          if (side == n) {
            lat.faces.push_back({q0, q1, q2});
            lat.faces.push_back({q0, q2, q3});
          } else {
            lat.faces.push_back({q0, q2, q1});
            lat.faces.push_back({q0, q3, q2});
          }
        }
      }
    }
  }
  return lat;
}

// Signed distance to a rounded square of half-size 1 and corner radius r.
double rounded_square(double x, double y, double r) {
  const double qx = std::abs(x) - (1.0 - r);
  const double qy = std::abs(y) - (1.0 - r);
  const double outside = std::hypot(std::max(qx, 0.0), std::max(qy, 0.0));
  return outside + std::min(std::max(qx, qy), 0.0) - r;
}

}  // namespace

Mesh unit_cube() {
  std::vector<Vec3> v;
  for (int i = 0; i < 8; ++i) v.emplace_back(i & 1, (i >> 1) & 1, (i >> 2) & 1);
  // Vertex index = x + 2y + 4z; every face listed counterclockwise from outside.
  std::vector<std::array<int, 3>> f = {
      {0, 2, 3}, {0, 3, 1},  // z = 0
      {4, 5, 7}, {4, 7, 6},  // z = 1
      {0, 1, 5}, {0, 5, 4},  // y = 0
      {2, 6, 7}, {2, 7, 3},  // y = 1
      {0, 4, 6}, {0, 6, 2},  // x = 0
      {1, 3, 7}, {1, 7, 5},  // x = 1
  };
  return Mesh::build(std::move(v), std::move(f));
}

Mesh cube_grid(int n) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "cube_grid needs n >= 1");
  const Lattice lat = cube_lattice(n);
  std::vector<Vec3> v;
  v.reserve(lat.points.size());
  for (const auto& c : lat.points) {
    v.emplace_back(2.0 * c[0] / n - 1.0, 2.0 * c[1] / n - 1.0, 2.0 * c[2] / n - 1.0);
  }
  return Mesh::build(std::move(v), lat.faces);
}

Mesh icosphere(int subdivisions) {
  if (subdivisions < 0) throw Error(ErrorCode::kInvalidArgument, "subdivisions must be >= 0");
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
                         {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
                         {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (Vec3& p : v) p.normalize();
  std::vector<std::array<int, 3>> f = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
      {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
      {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::unordered_map<std::uint64_t, int> midpoint;
    auto mid = [&](int a, int b) {
      const std::uint64_t key = (static_cast<std::uint64_t>(std::min(a, b)) << 32) |
                                static_cast<std::uint32_t>(std::max(a, b));
      auto [it, inserted] = midpoint.try_emplace(key, static_cast<int>(v.size()));
      if (inserted) v.push_back((v[a] + v[b]).normalized());
      return it->second;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(f.size() * 4);
    for (const auto& tri : f) {
      const int ab = mid(tri[0], tri[1]), bc = mid(tri[1], tri[2]), ca = mid(tri[2], tri[0]);
      next.push_back({tri[0], ab, ca});
      next.push_back({tri[1], bc, ab});
      next.push_back({tri[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    f = std::move(next);
  }
  return Mesh::build(std::move(v), std::move(f));
}

Mesh planar_grid(int n) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "planar_grid needs n >= 1");
  std::vector<Vec3> v;
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) v.emplace_back(double(i) / n, double(j) / n, 0.0);
  }
  std::vector<std::array<int, 3>> f;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int a = j * (n + 1) + i, b = a + 1, c = a + n + 2, d = a + n + 1;
      f.push_back({a, b, c});
      f.push_back({a, c, d});
    }
  }
  return Mesh::build(std::move(v), std::move(f));
}

Mesh beveled_cube(int n, double fillet, double chamfer) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "beveled_cube needs n >= 1");
  if (!(fillet > 0.0 && fillet < 1.0 && chamfer > 0.0 && chamfer < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "fillet and chamfer must lie in (0, 1)");
  }
  // Convex solid as the zero sublevel set of a max of convex functions.
  auto inside = [fillet, chamfer](const Vec3& p) {
    const double side = rounded_square(p.x(), p.y(), fillet);
    const double cap = std::abs(p.z()) - 1.0;
    const double bevel = std::abs(p.z()) - 1.0 + side + chamfer;
    return std::max({side, cap, bevel});
  };
  Mesh grid = cube_grid(n);
  std::vector<Vec3> v = grid.vertices();
  for (Vec3& p : v) {
    const Vec3 dir = p.normalized();
    double lo = 0.0, hi = 2.0;
    for (int it = 0; it < 64; ++it) {
      const double m = 0.5 * (lo + hi);
      (inside(m * dir) <= 0.0 ? lo : hi) = m;
    }
    p = 0.5 * (lo + hi) * dir;
  }
  return grid.with_positions(std::move(v));
}

}  // namespace semisparse::shapes
