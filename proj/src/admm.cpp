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

#include "semisparse/admm.h"

#include "semisparse/error.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>

namespace semisparse {

namespace {

using RowSparse = Eigen::SparseMatrix<double, Eigen::RowMajor>;

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kInvalidArgument, what);
}

void check_finite(const Field3& field, const char* what) {
  if (!field.allFinite()) {
    throw Error(ErrorCode::kNonFiniteValue, std::string(what) + " contains NaN or Inf");
  }
}

}  // namespace

void DenoiseParams::validate() const {
  require(lambda > 0.0, "lambda must be positive");
  require(alpha >= 0.0 && beta >= 0.0, "alpha and beta must be non-negative");
  require(rho1 > 0.0 && rho2 > 0.0, "rho1 and rho2 must be positive");
  require(sigma_e > 0.0 && sigma_l > 0.0, "sigma_e and sigma_l must be positive");
  require(max_iterations >= 0, "max_iterations must be non-negative");
  require(cg_tol > 0.0, "cg_tol must be positive");
  require(cg_max_iterations >= 0, "cg_max_iterations must be non-negative");
}

DynamicWeights compute_dynamic_weights(const Mesh& mesh, const Field3& normals, double sigma_e,
                                       double sigma_l) {
  if (normals.rows() != mesh.num_faces()) {
    throw Error(ErrorCode::kLengthMismatch, "expected one normal per face");
  }
  DynamicWeights w = unit_weights(mesh);
  const double se2 = 2.0 * sigma_e * sigma_e;
  const double sl4 = 2.0 * std::pow(sigma_l, 4);
#pragma omp parallel for schedule(static)
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (mesh.is_boundary_edge(e)) continue;
    const auto& f = mesh.edge_faces(e);
    w.edges[e] = std::exp(-(normals.row(f[0]) - normals.row(f[1])).squaredNorm() / se2);
  }
  const auto& lines = mesh.lines();
#pragma omp parallel for schedule(static)
  for (int l = 0; l < mesh.num_lines(); ++l) {
    const Line& line = lines[l];
    if (line.on_boundary()) continue;
    const double d2 = (normals.row(line.face_in) - 2.0 * normals.row(line.face) +
                       normals.row(line.face_out))
                          .squaredNorm();
    w.lines[l] = std::exp(-(d2 * d2) / sl4);
  }
  return w;
}

DynamicWeights unit_weights(const Mesh& mesh) {
  return {Eigen::VectorXd::Ones(mesh.num_edges()), Eigen::VectorXd::Ones(mesh.num_lines())};
}

NormalProblem NormalProblem::build(const Mesh& mesh, const Field3& noisy, bool normalize_scale) {
  if (noisy.rows() != mesh.num_faces()) {
    throw Error(ErrorCode::kLengthMismatch, "expected one noisy normal per face");
  }
  const Geometry geometry = compute_geometry(mesh);
  NormalProblem problem;
  problem.first_order = assemble_first_order(mesh);
  problem.second_order = assemble_second_order(mesh);
  problem.mass = mass_matrices(geometry);
  problem.noisy = noisy;
  if (normalize_scale && geometry.mean_edge_length > 0.0) {
    const double h = geometry.mean_edge_length;
    problem.length_scale = h;
    problem.mass.faces /= h * h;
    problem.mass.edges /= h;
    problem.mass.lines /= h;
  }
  return problem;
}

AdmmState AdmmState::zeros(const Mesh& mesh) {
  AdmmState s;
  s.p = Field3::Zero(mesh.num_edges(), 3);
  s.z_p = Field3::Zero(mesh.num_edges(), 3);
  s.q = Field3::Zero(mesh.num_lines(), 3);
  s.z_q = Field3::Zero(mesh.num_lines(), 3);
  s.weights = unit_weights(mesh);
  return s;
}

double soft_threshold(double x, double threshold) {
  const double magnitude = std::abs(x) - threshold;
  if (magnitude <= 0.0) return 0.0;
  return x > 0.0 ? magnitude : -magnitude;
}

Vec3 hard_threshold(const Vec3& x, double threshold) {
  return x.norm() <= threshold ? Vec3::Zero() : x;
}

double l0_threshold(double weight, double rho) { return std::sqrt(2.0 * weight / rho); }

CgReport conjugate_gradient(const RowSparse& a, const Eigen::VectorXd& b, Eigen::VectorXd& x,
                            double tol, int max_iterations) {
  CgReport report;
  const double b_norm = b.norm();
  if (b_norm == 0.0) {
    x.setZero();
    report.converged = true;
    return report;
  }
  const Eigen::VectorXd inv_diag = a.diagonal().cwiseInverse();
  Eigen::VectorXd r = b - a * x;
  double r_norm = r.norm();
  report.relative_residual = r_norm / b_norm;
  if (report.relative_residual <= tol) {
    report.converged = true;
    return report;
  }
  Eigen::VectorXd z = inv_diag.cwiseProduct(r);
  Eigen::VectorXd p = z;
  Eigen::VectorXd ap(x.size());
  double rz = r.dot(z);
  for (int k = 1; k <= max_iterations; ++k) {
    ap.noalias() = a * p;
    const double step = rz / p.dot(ap);
    x += step * p;
    r -= step * ap;
    r_norm = r.norm();
    report.iterations = k;
    report.relative_residual = r_norm / b_norm;
    if (report.relative_residual <= tol) {
      report.converged = true;
      return report;
    }
    z = inv_diag.cwiseProduct(r);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  return report;
}

RowSparse normal_system_matrix(const NormalProblem& problem, const DynamicWeights& weights,
                               const DenoiseParams& params) {
  const int nf = problem.num_faces();
  RowSparse a(nf, nf);
  a.reserve(Eigen::VectorXi::Constant(nf, 1));
  for (int f = 0; f < nf; ++f) a.insert(f, f) = params.lambda * problem.mass.faces[f];
  if (params.first_order_active()) {
    const RowSparse& d = problem.first_order.matrix;
    const Eigen::VectorXd scale =
        params.rho1 * problem.mass.edges.cwiseProduct(weights.edges);
    const RowSparse weighted = scale.asDiagonal() * d;
    a += RowSparse(d.transpose() * weighted);
  }
  if (params.second_order_active()) {
    const RowSparse& d2 = problem.second_order.matrix;
    const Eigen::VectorXd scale =
        params.rho2 * problem.mass.lines.cwiseProduct(weights.lines);
    const RowSparse weighted = scale.asDiagonal() * d2;
    a += RowSparse(d2.transpose() * weighted);
  }
  a.makeCompressed();
  return a;
}

Field3 normal_system_rhs(const NormalProblem& problem, const AdmmState& state,
                         const DenoiseParams& params) {
  Field3 rhs = (params.lambda * problem.mass.faces).asDiagonal() * problem.noisy;
  if (params.first_order_active()) {
    const Eigen::VectorXd scale =
        params.rho1 * problem.mass.edges.cwiseProduct(state.weights.edges);
    const Field3 target = state.p - state.z_p / params.rho1;
    rhs += problem.first_order.matrix.transpose() * (scale.asDiagonal() * target);
  }
  if (params.second_order_active()) {
    const Eigen::VectorXd scale =
        params.rho2 * problem.mass.lines.cwiseProduct(state.weights.lines);
    const Field3 target = state.q - state.z_q / params.rho2;
    rhs += problem.second_order.matrix.transpose() * (scale.asDiagonal() * target);
  }
  return rhs;
}

Field3 n_step(const AdmmState& state, const Field3& previous, const NormalProblem& problem,
              const DenoiseParams& params, int* near_zero, int* cg_iterations) {
  const RowSparse a = normal_system_matrix(problem, state.weights, params);
  const Field3 rhs = normal_system_rhs(problem, state, params);
  const int cap = params.cg_iteration_cap(problem.num_faces());
  Field3 solution(previous.rows(), 3);
  int total_cg = 0;
  for (int c = 0; c < 3; ++c) {
    Eigen::VectorXd x = previous.col(c);
    const Eigen::VectorXd b = rhs.col(c);
    const CgReport report = conjugate_gradient(a, b, x, params.cg_tol, cap);
    if (!report.converged) {
      throw Error(ErrorCode::kSolverDiverged,
                  "conjugate gradient stopped at relative residual " +
                      std::to_string(report.relative_residual) + " after " +
                      std::to_string(report.iterations) + " iterations");
    }
    total_cg += report.iterations;
    solution.col(c) = x;
  }
  int zeros = 0;
  for (Eigen::Index f = 0; f < solution.rows(); ++f) {
    const double n = solution.row(f).norm();
    if (n < 1e-12) {
      solution.row(f) = previous.row(f);
      ++zeros;
    } else {
      solution.row(f) /= n;
    }
  }
  if (near_zero) *near_zero = zeros;
  if (cg_iterations) *cg_iterations = total_cg;
  return solution;
}

Field3 p_step(const AdmmState& state, const Field3& normals, const NormalProblem& problem,
              const DenoiseParams& params) {
  Field3 p = problem.first_order.apply(normals) + state.z_p / params.rho1;
  const double base = params.alpha / params.rho1;
#pragma omp parallel for schedule(static)
  for (Eigen::Index e = 0; e < p.rows(); ++e) {
    const double t = state.weights.edges[e] * base;
    for (int c = 0; c < 3; ++c) p(e, c) = soft_threshold(p(e, c), t);
  }
  return p;
}

Field3 q_step(const AdmmState& state, const Field3& normals, const NormalProblem& problem,
              const DenoiseParams& params) {
  Field3 q = problem.second_order.apply(normals) + state.z_q / params.rho2;
#pragma omp parallel for schedule(static)
  for (Eigen::Index l = 0; l < q.rows(); ++l) {
    const double t = l0_threshold(state.weights.lines[l] * params.beta, params.rho2);
    const Vec3 x = q.row(l).transpose();
    q.row(l) = hard_threshold(x, t).transpose();
  }
  return q;
}

void dual_step(AdmmState& state, const Field3& normals, const NormalProblem& problem,
               const DenoiseParams& params) {
  if (params.first_order_active()) {
    state.z_p += params.rho1 * (problem.first_order.apply(normals) - state.p);
  }
  if (params.second_order_active()) {
    state.z_q += params.rho2 * (problem.second_order.apply(normals) - state.q);
  }
}

double energy(const Field3& normals, const NormalProblem& problem, const DynamicWeights& weights,
              const DenoiseParams& params) {
  const Field3 diff = normals - problem.noisy;
  double total = 0.5 * params.lambda * inner_product(Space::kU, diff, diff, problem.mass);
  if (params.alpha != 0.0) {
    const Field3 jump = problem.first_order.apply(normals);
    double sum = 0.0;
    for (Eigen::Index e = 0; e < jump.rows(); ++e) {
      sum += weights.edges[e] * jump.row(e).lpNorm<1>() * problem.mass.edges[e];
    }
    total += params.alpha * sum;
  }
  if (params.beta != 0.0) {
    const Field3 jump = problem.second_order.apply(normals);
    double sum = 0.0;
    for (Eigen::Index l = 0; l < jump.rows(); ++l) {
      if (jump.row(l).norm() > kL0ZeroTolerance) sum += weights.lines[l] * problem.mass.lines[l];
    }
    total += params.beta * sum;
  }
  return total;
}

DenoiseResult denoise_normals(const Mesh& mesh, const Field3& noisy, const DenoiseParams& params) {
  params.validate();
  check_finite(noisy, "input normals");
  const NormalProblem problem = NormalProblem::build(mesh, noisy, params.normalize_scale);
  const double stop = params.stop_tolerance(mesh.num_faces());

  AdmmState state = AdmmState::zeros(mesh);
  if (params.weight_update == WeightUpdate::kEveryIteration) {
    state.weights = compute_dynamic_weights(mesh, noisy, params.sigma_e, params.sigma_l);
  }

  DenoiseResult result;
  Field3 normals = params.init == NormalInit::kNoisy ? noisy : Field3::Zero(noisy.rows(), 3);
  while (state.iteration < params.max_iterations) {
    IterationStats stats;
    int near_zero = 0;
    Field3 next = n_step(state, normals, problem, params, &near_zero, &stats.cg_iterations);
    check_finite(next, "normals");
    result.near_zero_normals += near_zero;
    if (params.first_order_active()) state.p = p_step(state, next, problem, params);
    if (params.second_order_active()) state.q = q_step(state, next, problem, params);
    dual_step(state, next, problem, params);
    check_finite(state.z_p, "first-order multipliers");
    check_finite(state.z_q, "second-order multipliers");

    ++state.iteration;
    stats.iteration = state.iteration;
    stats.energy = energy(next, problem, state.weights, params);
    if (params.first_order_active()) {
      stats.residual_p = norm(Space::kV, Field3(problem.first_order.apply(next) - state.p), problem.mass);
    }
    if (params.second_order_active()) {
      stats.residual_q = norm(Space::kW, Field3(problem.second_order.apply(next) - state.q), problem.mass);
    }
    stats.normal_change = (next - normals).squaredNorm();
    result.diagnostics.push_back(stats);

    if (params.weight_update == WeightUpdate::kEveryIteration) {
      state.weights = compute_dynamic_weights(mesh, next, params.sigma_e, params.sigma_l);
    }
    normals = std::move(next);
    if (stats.normal_change <= stop) break;
  }
  result.normals = std::move(normals);
  return result;
}

void write_diagnostics_csv(const std::vector<IterationStats>& diagnostics, std::ostream& out) {
  out << "iter,energy,res_P,res_Q,dN\n";
  char buf[160];
  for (const IterationStats& s : diagnostics) {
    std::snprintf(buf, sizeof(buf), "%d,%.12g,%.12g,%.12g,%.12g\n", s.iteration, s.energy,
                  s.residual_p, s.residual_q, s.normal_change);
    out << buf;
  }
}

void write_diagnostics_csv(const std::vector<IterationStats>& diagnostics,
                           const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  write_diagnostics_csv(diagnostics, out);
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

}  // namespace semisparse
