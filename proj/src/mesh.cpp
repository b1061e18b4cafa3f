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

#include "semisparse/mesh.h"

#include "semisparse/error.h"

#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_map>

namespace semisparse {

namespace {

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

// Flattens per-vertex lists into offsets + values.
void to_csr(const std::vector<std::vector<int>>& lists, std::vector<int>& offsets,
            std::vector<int>& values) {
  offsets.assign(lists.size() + 1, 0);
  for (std::size_t i = 0; i < lists.size(); ++i) {
    offsets[i + 1] = offsets[i] + static_cast<int>(lists[i].size());
  }
  values.clear();
  values.reserve(offsets.back());
  for (const auto& l : lists) values.insert(values.end(), l.begin(), l.end());
}

}  // namespace

Mesh Mesh::build(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> faces) {
  Mesh m;
  m.vertices_ = std::move(vertices);
  m.faces_ = std::move(faces);
  const int nv = m.num_vertices();
  const int nf = m.num_faces();

  for (int f = 0; f < nf; ++f) {
    const auto& t = m.faces_[f];
    for (int k = 0; k < 3; ++k) {
      if (t[k] < 0 || t[k] >= nv) {
        throw Error(ErrorCode::kIndexOutOfRange,
                    "face " + std::to_string(f) + " references vertex " + std::to_string(t[k]));
      }
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
      throw Error(ErrorCode::kDegenerateFace, "face " + std::to_string(f) + " repeats a vertex");
    }
  }

  // Edges are numbered in order of first appearance.
  std::unordered_map<std::uint64_t, int> edge_index;
  edge_index.reserve(static_cast<std::size_t>(nf) * 2);
  m.face_edges_.resize(nf);
  for (int f = 0; f < nf; ++f) {
    const auto& t = m.faces_[f];
    for (int k = 0; k < 3; ++k) {
      const int a = t[k];
      const int b = t[(k + 1) % 3];
      auto [it, inserted] = edge_index.try_emplace(edge_key(a, b), m.num_edges());
      const int e = it->second;
      if (inserted) {
        m.edges_.push_back({std::min(a, b), std::max(a, b)});
        m.edge_faces_.push_back({f, kNone});
      } else {
        auto& ef = m.edge_faces_[e];
        if (ef[1] != kNone) {
          throw Error(ErrorCode::kNonManifoldEdge,
                      "edge (" + std::to_string(a) + ", " + std::to_string(b) +
                          ") has more than two faces");
        }
        ef[1] = f;
      }
      m.face_edges_[f][k] = {e, a < b ? 1 : -1};
    }
  }

  // Consistently oriented neighbors traverse a shared edge in opposite directions.
  for (int e = 0; e < m.num_edges(); ++e) {
    const auto& ef = m.edge_faces_[e];
    if (ef[1] == kNone) continue;
    int signs[2] = {0, 0};
    for (int s = 0; s < 2; ++s) {
      for (const FaceEdge& fe : m.face_edges_[ef[s]]) {
        if (fe.edge == e) signs[s] = fe.sign;
      }
    }
    if (signs[0] * signs[1] != -1) {
      throw Error(ErrorCode::kInconsistentOrientation,
                  "faces " + std::to_string(ef[0]) + " and " + std::to_string(ef[1]) +
                      " traverse their shared edge in the same direction");
    }
  }

  auto across = [&m](int e, int f) {
    const auto& ef = m.edge_faces_[e];
    return ef[0] == f ? ef[1] : ef[0];
  };
  m.lines_.resize(static_cast<std::size_t>(nf) * 3);
  for (int f = 0; f < nf; ++f) {
    for (int j = 0; j < 3; ++j) {
      Line& l = m.lines_[3 * f + j];
      l.face = f;
      l.vertex = m.faces_[f][j];
      l.edge_in = m.face_edges_[f][(j + 2) % 3].edge;
      l.edge_out = m.face_edges_[f][j].edge;
      l.face_in = across(l.edge_in, f);
      l.face_out = across(l.edge_out, f);
    }
  }

  std::vector<std::vector<int>> vf(nv), vn(nv);
  for (int f = 0; f < nf; ++f) {
    for (int v : m.faces_[f]) vf[v].push_back(f);
  }
  for (const auto& e : m.edges_) {
    vn[e[0]].push_back(e[1]);
    vn[e[1]].push_back(e[0]);
  }
  for (auto& l : vn) std::sort(l.begin(), l.end());
  to_csr(vf, m.vertex_face_offsets_, m.vertex_face_list_);
  to_csr(vn, m.vertex_neighbor_offsets_, m.vertex_neighbor_list_);
  return m;
}

Mesh Mesh::with_positions(std::vector<Vec3> positions) const {
  if (positions.size() != vertices_.size()) {
    throw Error(ErrorCode::kLengthMismatch, "position count does not match vertex count");
  }
  Mesh m = *this;
  m.vertices_ = std::move(positions);
  return m;
}

void Mesh::check_face(int f) const {
  if (f < 0 || f >= num_faces()) {
    throw Error(ErrorCode::kIndexOutOfRange, "face index " + std::to_string(f));
  }
}

std::vector<int> Mesh::face_ring(int f) const {
  check_face(f);
  std::vector<int> ring;
  for (const FaceEdge& fe : face_edges_[f]) {
    const auto& ef = edge_faces_[fe.edge];
    const int other = ef[0] == f ? ef[1] : ef[0];
    if (other != kNone) ring.push_back(other);
  }
  return ring;
}

std::array<int, 3> Mesh::face_lines(int f) const {
  check_face(f);
  return {3 * f, 3 * f + 1, 3 * f + 2};
}

std::vector<int> Mesh::ring_lines(int f) const {
  std::vector<int> ring = face_ring(f);
  std::vector<int> out;
  const auto& t = faces_[f];
  std::sort(ring.begin(), ring.end());
  ring.erase(std::unique(ring.begin(), ring.end()), ring.end());
  for (int g : ring) {
    for (int j = 0; j < 3; ++j) {
      const int v = faces_[g][j];
      if (v == t[0] || v == t[1] || v == t[2]) out.push_back(3 * g + j);
    }
  }
  return out;
}

std::vector<int> Mesh::edge_lines(int e) const {
  if (e < 0 || e >= num_edges()) {
    throw Error(ErrorCode::kIndexOutOfRange, "edge index " + std::to_string(e));
  }
  std::vector<int> out;
  for (int f : edge_faces_[e]) {
    if (f == kNone) continue;
    for (int j = 0; j < 3; ++j) {
      const int v = faces_[f][j];
      if (v == edges_[e][0] || v == edges_[e][1]) out.push_back(3 * f + j);
    }
  }
  return out;
}

std::span<const int> Mesh::vertex_faces(int v) const {
  if (v < 0 || v >= num_vertices()) {
    throw Error(ErrorCode::kIndexOutOfRange, "vertex index " + std::to_string(v));
  }
  const int b = vertex_face_offsets_[v];
  return {vertex_face_list_.data() + b, static_cast<std::size_t>(vertex_face_offsets_[v + 1] - b)};
}

std::span<const int> Mesh::vertex_neighbors(int v) const {
  if (v < 0 || v >= num_vertices()) {
    throw Error(ErrorCode::kIndexOutOfRange, "vertex index " + std::to_string(v));
  }
  const int b = vertex_neighbor_offsets_[v];
  return {vertex_neighbor_list_.data() + b,
          static_cast<std::size_t>(vertex_neighbor_offsets_[v + 1] - b)};
}

Geometry compute_geometry(const Mesh& mesh) {
  const int nf = mesh.num_faces();
  const auto& x = mesh.vertices();
  Geometry g;
  g.face_area.resize(nf);
  g.face_normal.resize(nf, 3);
  g.face_centroid.resize(nf, 3);

  double diag2 = 0.0;
  if (!x.empty()) {
    Vec3 lo = x.front(), hi = x.front();
    for (const Vec3& p : x) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    diag2 = (hi - lo).squaredNorm();
  }

  for (int f = 0; f < nf; ++f) {
    const auto& t = mesh.faces()[f];
    const Vec3 cross = (x[t[1]] - x[t[0]]).cross(x[t[2]] - x[t[0]]);
    const double twice_area = cross.norm();
    g.face_area[f] = 0.5 * twice_area;
    if (!(g.face_area[f] >= 1e-14 * diag2) || twice_area == 0.0) {
      throw Error(ErrorCode::kDegenerateFace,
                  "face " + std::to_string(f) + " has area " + std::to_string(g.face_area[f]));
    }
    g.face_normal.row(f) = cross / twice_area;
    g.face_centroid.row(f) = (x[t[0]] + x[t[1]] + x[t[2]]) / 3.0;
  }

  g.edge_length.resize(mesh.num_edges());
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const auto& ed = mesh.edges()[e];
    g.edge_length[e] = (x[ed[1]] - x[ed[0]]).norm();
  }
  g.mean_edge_length = mesh.num_edges() > 0 ? g.edge_length.mean() : 0.0;

  g.line_length.resize(mesh.num_lines());
  for (int l = 0; l < mesh.num_lines(); ++l) {
    const Line& line = mesh.lines()[l];
    g.line_length[l] = (x[line.vertex] - g.face_centroid.row(line.face).transpose()).norm();
  }
  return g;
}

Field3 face_normals(const Mesh& mesh) { return compute_geometry(mesh).face_normal; }

}  // namespace semisparse
