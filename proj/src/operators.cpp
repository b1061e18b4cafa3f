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

#include "semisparse/operators.h"

#include "semisparse/error.h"

#include <cstdio>
#include <fstream>
#include <vector>

namespace semisparse {

namespace {

using Triplet = Eigen::Triplet<double>;

SparseOperator make_operator(int rows, int cols, const std::vector<Triplet>& entries, Domain row,
                             Domain col) {
  SparseOperator op;
  op.matrix.resize(rows, cols);
  op.matrix.setFromTriplets(entries.begin(), entries.end());
  op.matrix.makeCompressed();
  op.row_domain = row;
  op.col_domain = col;
  return op;
}

int sign_in_face(const Mesh& mesh, int edge, int face) {
  for (const FaceEdge& fe : mesh.face_edges(face)) {
    if (fe.edge == edge) return fe.sign;
  }
  return 0;
}

const Eigen::VectorXd& weights_of(Space space, const MassMatrices& mass) {
  switch (space) {
    case Space::kU: return mass.faces;
    case Space::kV: return mass.edges;
    case Space::kW: return mass.lines;
  }
  return mass.faces;
}

void check_lengths(Eigen::Index a, Eigen::Index b, Eigen::Index w) {
  if (a != b || a != w) {
    throw Error(ErrorCode::kLengthMismatch, "inner product of fields with " + std::to_string(a) +
                                                " and " + std::to_string(b) +
                                                " entries over a space of " + std::to_string(w));
  }
}

}  // namespace

SparseOperator assemble_first_order(const Mesh& mesh) {
  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(mesh.num_edges()) * 2);
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (mesh.is_boundary_edge(e)) continue;
    for (int f : mesh.edge_faces(e)) entries.emplace_back(e, f, sign_in_face(mesh, e, f));
  }
  return make_operator(mesh.num_edges(), mesh.num_faces(), entries, Domain::kEdges,
                       Domain::kFaces);
}

SparseOperator assemble_second_order(const Mesh& mesh) {
  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(mesh.num_lines()) * 3);
  for (int l = 0; l < mesh.num_lines(); ++l) {
    const Line& line = mesh.lines()[l];
    if (line.on_boundary()) continue;
    entries.emplace_back(l, line.face_in, 1.0);
    entries.emplace_back(l, line.face, -2.0);
    entries.emplace_back(l, line.face_out, 1.0);
  }
  return make_operator(mesh.num_lines(), mesh.num_faces(), entries, Domain::kLines,
                       Domain::kFaces);
}

SparseOperator assemble_edge_jump(const Mesh& mesh) {
  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(mesh.num_lines()) * 2);
  for (int l = 0; l < mesh.num_lines(); ++l) {
    const Line& line = mesh.lines()[l];
    if (line.on_boundary()) continue;
    entries.emplace_back(l, line.edge_in, sign_in_face(mesh, line.edge_in, line.face));
    entries.emplace_back(l, line.edge_out, sign_in_face(mesh, line.edge_out, line.face));
  }
  return make_operator(mesh.num_lines(), mesh.num_edges(), entries, Domain::kLines,
                       Domain::kEdges);
}

MassMatrices mass_matrices(const Geometry& geometry) {
  return {geometry.face_area, geometry.edge_length, geometry.line_length};
}

double inner_product(Space space, const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                     const MassMatrices& mass) {
  const Eigen::VectorXd& w = weights_of(space, mass);
  check_lengths(a.size(), b.size(), w.size());
  double sum = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) sum += a[i] * b[i] * w[i];
  return sum;
}

double inner_product(Space space, const Field3& a, const Field3& b, const MassMatrices& mass) {
  const Eigen::VectorXd& w = weights_of(space, mass);
  check_lengths(a.rows(), b.rows(), w.size());
  double sum = 0.0;
  for (int c = 0; c < 3; ++c) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) sum += a(i, c) * b(i, c) * w[i];
  }
  return sum;
}

double norm(Space space, const Eigen::VectorXd& a, const MassMatrices& mass) {
  return std::sqrt(inner_product(space, a, a, mass));
}

double norm(Space space, const Field3& a, const MassMatrices& mass) {
  return std::sqrt(inner_product(space, a, a, mass));
}

Eigen::VectorXd face_divergence(const Mesh& mesh, const Geometry& geometry,
                                const Eigen::VectorXd& edge_values) {
  check_lengths(edge_values.size(), mesh.num_edges(), geometry.edge_length.size());
  Eigen::VectorXd out(mesh.num_faces());
  for (int f = 0; f < mesh.num_faces(); ++f) {
    double sum = 0.0;
    for (const FaceEdge& fe : mesh.face_edges(f)) {
      if (mesh.is_boundary_edge(fe.edge)) continue;
      sum += edge_values[fe.edge] * fe.sign * geometry.edge_length[fe.edge];
    }
    out[f] = sum / geometry.face_area[f];
  }
  return out;
}

Eigen::VectorXd second_order_adjoint(const Mesh& mesh, const Geometry& geometry,
                                     const Eigen::VectorXd& line_values) {
  check_lengths(line_values.size(), mesh.num_lines(), geometry.line_length.size());
  const auto& lines = mesh.lines();
  Eigen::VectorXd out(mesh.num_faces());
  for (int f = 0; f < mesh.num_faces(); ++f) {
    double ring = 0.0;
    for (int l : mesh.ring_lines(f)) {
      if (lines[l].on_boundary()) continue;
      // A ring line reaches f through its entering or its leaving edge; when
      // both lead to f (two faces sharing two edges) it counts twice.
      const int hits = (lines[l].face_in == f) + (lines[l].face_out == f);
      ring += hits * line_values[l] * geometry.line_length[l];
    }
    double own = 0.0;
    for (int l : mesh.face_lines(f)) {
      if (lines[l].on_boundary()) continue;
      own += line_values[l] * geometry.line_length[l];
    }
    out[f] = (ring - 2.0 * own) / geometry.face_area[f];
  }
  return out;
}

Eigen::VectorXd edge_divergence(const Mesh& mesh, const Geometry& geometry,
                                const Eigen::VectorXd& line_values) {
  check_lengths(line_values.size(), mesh.num_lines(), geometry.line_length.size());
  const auto& lines = mesh.lines();
  Eigen::VectorXd out(mesh.num_edges());
  for (int e = 0; e < mesh.num_edges(); ++e) {
    double sum = 0.0;
    for (int l : mesh.edge_lines(e)) {
      if (lines[l].on_boundary()) continue;
      sum += line_values[l] * sign_in_face(mesh, e, lines[l].face) * geometry.line_length[l];
    }
    out[e] = sum / geometry.edge_length[e];
  }
  return out;
}

void write_matrix_market(const SparseOperator& op, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << op.rows() << ' ' << op.cols() << ' ' << op.matrix.nonZeros() << '\n';
  char buf[64];
  for (int r = 0; r < op.rows(); ++r) {
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(op.matrix, r); it; ++it) {
      std::snprintf(buf, sizeof(buf), "%.17g", it.value());
      out << r + 1 << ' ' << it.col() + 1 << ' ' << buf << '\n';
    }
  }
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

}  // namespace semisparse
