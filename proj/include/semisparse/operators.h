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

#include <Eigen/SparseCore>

#include <filesystem>

namespace semisparse {

/// Element sets a discrete field can live on.
enum class Domain { kFaces, kEdges, kLines };

/// Row-compressed difference operator between two element domains.
struct SparseOperator {
  Eigen::SparseMatrix<double, Eigen::RowMajor> matrix;
  Domain row_domain = Domain::kEdges;
  Domain col_domain = Domain::kFaces;

  int rows() const { return static_cast<int>(matrix.rows()); }
  int cols() const { return static_cast<int>(matrix.cols()); }
  Eigen::VectorXd apply(const Eigen::VectorXd& u) const { return matrix * u; }
  /// Channel-wise application to a 3-vector field.
  Field3 apply(const Field3& u) const { return matrix * u; }
};

/// Diagonals of the face, edge and line mass matrices.
struct MassMatrices {
  Eigen::VectorXd faces;  // s_tau
  Eigen::VectorXd edges;  // len(e)
  Eigen::VectorXd lines;  // len(l)
};

/// First-order jump across edges (|E| x |T|). Row e holds sgn(e, tau) for
/// both incident faces; boundary rows are empty.
SparseOperator assemble_first_order(const Mesh& mesh);

/// Second-order jump across lines (3|T| x |T|): +1, -2, +1 on the faces
/// (face_in, face, face_out). Rows of lines touching a boundary edge are empty.
SparseOperator assemble_second_order(const Mesh& mesh);

/// Edge-to-line 1-form jump (3|T| x |E|): sgn(edge_in, face) and
/// sgn(edge_out, face). Same boundary rule as the second-order operator.
SparseOperator assemble_edge_jump(const Mesh& mesh);

MassMatrices mass_matrices(const Geometry& geometry);

/// Weighted inner-product spaces: U (faces, area), V (edges, length),
/// W (lines, length).
enum class Space { kU, kV, kW };

/// Sum of a_i * b_i * weight_i. Throws kLengthMismatch.
double inner_product(Space space, const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                     const MassMatrices& mass);
/// Vector fields sum the three channel inner products.
double inner_product(Space space, const Field3& a, const Field3& b, const MassMatrices& mass);
double norm(Space space, const Eigen::VectorXd& a, const MassMatrices& mass);
double norm(Space space, const Field3& a, const MassMatrices& mass);

// Matrix-free divergence-type operators, evaluated element by element from the
// mesh tables. They are independent of the assembled matrices above.

/// Per face: (1 / s_tau) * sum over interior edges of v_e sgn(e, tau) len(e).
Eigen::VectorXd face_divergence(const Mesh& mesh, const Geometry& geometry,
                                const Eigen::VectorXd& edge_values);

/// Per face: (1 / s_tau) * (sum over B2(tau) of w_l len(l) - 2 * sum over
/// B1(tau) of w_l len(l)), skipping lines that touch the boundary.
Eigen::VectorXd second_order_adjoint(const Mesh& mesh, const Geometry& geometry,
                                     const Eigen::VectorXd& line_values);

/// Per edge: (1 / len(e)) * sum over B1(e) of w_l sgn(e, tau_l) len(l).
Eigen::VectorXd edge_divergence(const Mesh& mesh, const Geometry& geometry,
                                const Eigen::VectorXd& line_values);

/// MatrixMarket coordinate dump for debugging. Throws kIoError.
void write_matrix_market(const SparseOperator& op, const std::filesystem::path& path);

}  // namespace semisparse
