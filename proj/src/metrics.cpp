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

#include "semisparse/metrics.h"

#include "semisparse/error.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace semisparse {

Mesh add_gaussian_noise(const Mesh& mesh, const NoiseSpec& spec) {
  if (!(spec.sigma_rel >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "sigma must be >= 0");
  if (spec.sigma_rel == 0.0) return mesh;
  const double sigma = spec.sigma_rel * compute_geometry(mesh).mean_edge_length;
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, sigma);
  std::vector<Vec3> x = mesh.vertices();
  if (spec.direction == NoiseDirection::kRandom) {
    for (Vec3& p : x) {
      for (int k = 0; k < 3; ++k) p[k] += gauss(rng);
    }
  } else {
    const std::vector<Vec3> normals = area_weighted_vertex_normals(mesh);
    for (std::size_t v = 0; v < x.size(); ++v) x[v] += gauss(rng) * normals[v];
  }
  return mesh.with_positions(std::move(x));
}

std::vector<Vec3> area_weighted_vertex_normals(const Mesh& mesh) {
  const auto& x = mesh.vertices();
  std::vector<Vec3> n(x.size(), Vec3::Zero());
  for (const auto& t : mesh.faces()) {
    const Vec3 c = (x[t[1]] - x[t[0]]).cross(x[t[2]] - x[t[0]]);
    for (int v : t) n[v] += c;
  }
  for (Vec3& v : n) {
    const double len = v.norm();
    if (len > 0.0) v /= len;
  }
  return n;
}

std::vector<double> angular_differences(const Field3& normals, const Field3& reference) {
  if (normals.rows() != reference.rows()) {
    throw Error(ErrorCode::kLengthMismatch, "normal fields differ in face count");
  }
  std::vector<double> out(normals.rows());
  for (Eigen::Index f = 0; f < normals.rows(); ++f) {
    const double c = std::clamp(normals.row(f).dot(reference.row(f)), -1.0, 1.0);
    out[f] = std::acos(c) * 180.0 / std::numbers::pi;
  }
  return out;
}

double mean_angular_difference(const Field3& normals, const Field3& reference) {
  const std::vector<double> angles = angular_differences(normals, reference);
  if (angles.empty()) return 0.0;
  double sum = 0.0;
  for (double a : angles) sum += a;
  return sum / static_cast<double>(angles.size());
}

// Voronoi-region walk over vertices, edges and the face interior.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + (d1 / (d1 - d3)) * ab;

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + (d2 / (d2 - d6)) * ac;

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  }

  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  return (p - closest_point_on_triangle(p, a, b, c)).norm();
}

SurfaceDistance::SurfaceDistance(const Mesh& surface, bool force_bvh) {
  if (surface.num_faces() == 0) throw Error(ErrorCode::kEmptyMesh, "reference mesh has no faces");
  const auto& x = surface.vertices();
  triangles_.reserve(surface.num_faces());
  for (const auto& t : surface.faces()) triangles_.push_back({x[t[0]], x[t[1]], x[t[2]]});
  order_.resize(triangles_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = static_cast<int>(i);
  if (force_bvh || surface.num_faces() >= kBvhThreshold) {
    nodes_.reserve(2 * triangles_.size() / 4 + 1);
    build(0, static_cast<int>(order_.size()));
  }
}

int SurfaceDistance::build(int begin, int end) {
  const int index = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (int i = begin; i < end; ++i) {
    for (const Vec3& v : triangles_[order_[i]]) {
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
  }
  nodes_[index].lo = lo;
  nodes_[index].hi = hi;
  nodes_[index].begin = begin;
  nodes_[index].end = end;
  if (end - begin <= 4) return index;

  // Median split of triangle centroids along the widest axis.
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  const int mid = begin + (end - begin) / 2;
  auto key = [this, axis](int t) {
    const auto& tri = triangles_[t];
    return tri[0][axis] + tri[1][axis] + tri[2][axis];
  };
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&key](int l, int r) { return key(l) < key(r) || (key(l) == key(r) && l < r); });
  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[index].left = left;
  nodes_[index].right = right;
  return index;
}

double SurfaceDistance::box_distance2(const Node& node, const Vec3& p) const {
  const Vec3 d = (node.lo - p).cwiseMax(p - node.hi).cwiseMax(0.0);
  return d.squaredNorm();
}

double SurfaceDistance::triangle_distance2(int t, const Vec3& p) const {
  const auto& tri = triangles_[t];
  return (p - closest_point_on_triangle(p, tri[0], tri[1], tri[2])).squaredNorm();
}

double SurfaceDistance::distance(const Vec3& p) const {
  double best = std::numeric_limits<double>::infinity();
  if (nodes_.empty()) {
    for (int t = 0; t < static_cast<int>(triangles_.size()); ++t) {
      best = std::min(best, triangle_distance2(t, p));
    }
    return std::sqrt(best);
  }
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    if (box_distance2(node, p) >= best) continue;
    if (node.left < 0) {
      for (int i = node.begin; i < node.end; ++i) best = std::min(best, triangle_distance2(order_[i], p));
      continue;
    }
    // Visit the nearer child first.
    const double dl = box_distance2(nodes_[node.left], p);
    const double dr = box_distance2(nodes_[node.right], p);
    if (dl < dr) {
      stack.push_back(node.right);
      stack.push_back(node.left);
    } else {
      stack.push_back(node.left);
      stack.push_back(node.right);
    }
  }
  return std::sqrt(best);
}

double vertex_error(const Mesh& denoised, const Mesh& reference) {
  if (denoised.num_faces() == 0 || denoised.num_vertices() == 0) {
    throw Error(ErrorCode::kEmptyMesh, "denoised mesh is empty");
  }
  const SurfaceDistance surface(reference);
  const auto& x = denoised.vertices();
  std::vector<double> face_area(denoised.num_faces());
  double total_area = 0.0;
  for (int f = 0; f < denoised.num_faces(); ++f) {
    const auto& t = denoised.faces()[f];
    face_area[f] = 0.5 * (x[t[1]] - x[t[0]]).cross(x[t[2]] - x[t[0]]).norm();
    total_area += face_area[f];
  }
  std::vector<double> contribution(x.size(), 0.0);
#pragma omp parallel for schedule(dynamic, 64)
  for (int v = 0; v < denoised.num_vertices(); ++v) {
    double ring_area = 0.0;
    for (int f : denoised.vertex_faces(v)) ring_area += face_area[f];
    if (ring_area == 0.0) continue;
    const double d = surface.distance(x[v]);
    contribution[v] = ring_area * d * d;
  }
  double sum = 0.0;
  for (double c : contribution) sum += c;
  return std::sqrt(sum / (3.0 * total_area));
}

}  // namespace semisparse
