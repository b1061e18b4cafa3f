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
#include "semisparse/operators.h"

#include <Eigen/SparseCore>

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace semisparse {

enum class WeightUpdate {
  kEveryIteration,  // recompute w_e, w_l from the current normals after each dual step
  kFrozen,          // w_e = w_l = 1 throughout
};

enum class NormalInit { kNoisy, kZero };

/// Parameters of the semi-sparse normal filter.
///
/// With `normalize_scale` the face, edge and line masses are divided by the
/// mean edge length (squared for areas), so the same parameters behave alike
/// on meshes of any size. A regularizer whose weight (alpha or beta) is zero
/// is switched off entirely, penalty term included.
struct DenoiseParams {
  double lambda = 1.0;
  double alpha = 0.2;
  double beta = 0.005;
  double rho1 = 0.25;
  double rho2 = 0.01;
  double sigma_e = 0.3;
  double sigma_l = 0.5;
  /// Stop once the squared change of the normals drops to this; negative
  /// selects 1e-8 * |T|.
  double eps = -1.0;
  int max_iterations = 100;
  double cg_tol = 1e-8;
  /// 0 selects 10 * |T|.
  int cg_max_iterations = 0;
  WeightUpdate weight_update = WeightUpdate::kEveryIteration;
  NormalInit init = NormalInit::kNoisy;
  bool normalize_scale = true;

  /// Throws kInvalidArgument.
  void validate() const;
  double stop_tolerance(int num_faces) const { return eps >= 0.0 ? eps : 1e-8 * num_faces; }
  int cg_iteration_cap(int num_faces) const {
    return cg_max_iterations > 0 ? cg_max_iterations : 10 * num_faces;
  }
  bool first_order_active() const { return alpha > 0.0; }
  bool second_order_active() const { return beta > 0.0; }
};

struct DynamicWeights {
  Eigen::VectorXd edges;  // w_e in (0, 1]
  Eigen::VectorXd lines;  // w_l in (0, 1]
};

/// w_e = exp(-|N+ - N-|^2 / (2 sigma_e^2)),
/// w_l = exp(-|N+ - 2N + N-|^4 / (2 sigma_l^4)); boundary elements get 1.
DynamicWeights compute_dynamic_weights(const Mesh& mesh, const Field3& normals, double sigma_e,
                                       double sigma_l);
DynamicWeights unit_weights(const Mesh& mesh);

/// Operators, masses and the noisy normals the solver works against.
struct NormalProblem {
  SparseOperator first_order;
  SparseOperator second_order;
  MassMatrices mass;
  Field3 noisy;
  /// Length unit the masses were divided by (1 when not normalized).
  double length_scale = 1.0;

  static NormalProblem build(const Mesh& mesh, const Field3& noisy, bool normalize_scale);
  int num_faces() const { return static_cast<int>(noisy.rows()); }
};

/// Auxiliary variables, scaled duals and weights of the splitting.
struct AdmmState {
  Field3 p;    // per edge
  Field3 q;    // per line
  Field3 z_p;  // per edge
  Field3 z_q;  // per line
  DynamicWeights weights;
  int iteration = 0;

  static AdmmState zeros(const Mesh& mesh);
};

double soft_threshold(double x, double threshold);
/// Whole-vector hard threshold: zero when |x| <= threshold, else x.
Vec3 hard_threshold(const Vec3& x, double threshold);
/// Cut-off below which the prox of weight * 1[q != 0] + (rho / 2)|q - x|^2 is 0.
double l0_threshold(double weight, double rho);

struct CgReport {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Jacobi-preconditioned conjugate gradient on a symmetric positive definite
/// matrix, warm-started from `x`. Stops at |b - Ax| <= tol * |b|.
CgReport conjugate_gradient(const Eigen::SparseMatrix<double, Eigen::RowMajor>& a,
                            const Eigen::VectorXd& b, Eigen::VectorXd& x, double tol,
                            int max_iterations);

/// lambda Ms + rho1 D^T Me We D + rho2 (D2)^T Ml Wl D2, inactive blocks omitted.
Eigen::SparseMatrix<double, Eigen::RowMajor> normal_system_matrix(const NormalProblem& problem,
                                                                  const DynamicWeights& weights,
                                                                  const DenoiseParams& params);
/// lambda Ms N0 + rho1 D^T Me We (P - zP / rho1) + rho2 (D2)^T Ml Wl (Q - zQ / rho2).
Field3 normal_system_rhs(const NormalProblem& problem, const AdmmState& state,
                         const DenoiseParams& params);

/// Solves the normal system channel by channel from `previous` and projects
/// every row onto the unit sphere. Rows whose solution norm is below 1e-12
/// keep their previous value and are counted in `near_zero`.
/// Throws kSolverDiverged.
Field3 n_step(const AdmmState& state, const Field3& previous, const NormalProblem& problem,
              const DenoiseParams& params, int* near_zero = nullptr, int* cg_iterations = nullptr);

/// Component-wise soft threshold of D N + zP / rho1 at w_e alpha / rho1.
Field3 p_step(const AdmmState& state, const Field3& normals, const NormalProblem& problem,
              const DenoiseParams& params);

/// Per-line hard threshold of D2 N + zQ / rho2 at sqrt(2 w_l beta / rho2).
Field3 q_step(const AdmmState& state, const Field3& normals, const NormalProblem& problem,
              const DenoiseParams& params);

/// zP += rho1 (D N - P), zQ += rho2 (D2 N - Q); inactive blocks are left alone.
void dual_step(AdmmState& state, const Field3& normals, const NormalProblem& problem,
               const DenoiseParams& params);

inline constexpr double kL0ZeroTolerance = 1e-10;

/// Objective of the filter:
/// (lambda/2)|N - N0|_U^2 + alpha sum_e w_e |D N|_e|_1 len(e)
///   + beta sum_l w_l |D2 N|_l|_0 len(l).
double energy(const Field3& normals, const NormalProblem& problem, const DynamicWeights& weights,
              const DenoiseParams& params);

struct IterationStats {
  int iteration = 0;
  double energy = 0.0;
  double residual_p = 0.0;  // |D N - P|_V
  double residual_q = 0.0;  // |D2 N - Q|_W
  double normal_change = 0.0;  // |N^k - N^{k-1}|_2^2
  int cg_iterations = 0;
};

struct DenoiseResult {
  Field3 normals;
  std::vector<IterationStats> diagnostics;
  int near_zero_normals = 0;
};

/// Runs the three-block ADMM until the squared normal change drops to the stop
/// tolerance or max_iterations outer iterations have run.
/// Throws kSolverDiverged, kNonFiniteValue, kLengthMismatch, kInvalidArgument.
DenoiseResult denoise_normals(const Mesh& mesh, const Field3& noisy, const DenoiseParams& params);

/// CSV with header `iter,energy,res_P,res_Q,dN`.
void write_diagnostics_csv(const std::vector<IterationStats>& diagnostics, std::ostream& out);
void write_diagnostics_csv(const std::vector<IterationStats>& diagnostics,
                           const std::filesystem::path& path);

}  // namespace semisparse
