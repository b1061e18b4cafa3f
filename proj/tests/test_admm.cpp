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
#include "semisparse/admm.h"
#include "semisparse/error.h"
#include "semisparse/metrics.h"
#include "semisparse/shapes.h"
#include "test_util.h"

#include <Eigen/Dense>

#include <cmath>
#include <sstream>
#include <string>

using namespace semisparse;

namespace {

Mesh two_triangles() {
  return Mesh::build({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}}, {{0, 1, 2}, {1, 3, 2}});
}

DenoiseParams random_params(testing::Rng& rng) {
  std::uniform_real_distribution<double> u(0.05, 3.0);
  DenoiseParams p;
  p.lambda = u(rng);
  p.alpha = u(rng);
  p.beta = u(rng);
  p.rho1 = u(rng);
  p.rho2 = u(rng);
  return p;
}

DynamicWeights random_weights(testing::Rng& rng, const Mesh& m) {
  std::uniform_real_distribution<double> u(0.01, 1.0);
  DynamicWeights w = unit_weights(m);
  for (int e = 0; e < w.edges.size(); ++e) w.edges[e] = u(rng);
  for (int l = 0; l < w.lines.size(); ++l) w.lines[l] = u(rng);
  return w;
}

AdmmState random_state(testing::Rng& rng, const Mesh& m) {
  AdmmState s = AdmmState::zeros(m);
  s.p = testing::random_field(rng, m.num_edges());
  s.z_p = testing::random_field(rng, m.num_edges());
  s.q = testing::random_field(rng, m.num_lines());
  s.z_q = testing::random_field(rng, m.num_lines());
  s.weights = random_weights(rng, m);
  return s;
}

// Dense system assembled straight from the operator matrices.
Eigen::MatrixXd dense_system(const NormalProblem& pr, const DynamicWeights& w, const DenoiseParams& p) {
  const Eigen::MatrixXd d(pr.first_order.matrix), d2(pr.second_order.matrix);
  Eigen::MatrixXd a = p.lambda * Eigen::MatrixXd(pr.mass.faces.asDiagonal());
  a += p.rho1 * d.transpose() * pr.mass.edges.cwiseProduct(w.edges).asDiagonal() * d;
  a += p.rho2 * d2.transpose() * pr.mass.lines.cwiseProduct(w.lines).asDiagonal() * d2;
  return a;
}

Eigen::MatrixXd dense_rhs(const NormalProblem& pr, const AdmmState& s, const DenoiseParams& p) {
  const Eigen::MatrixXd d(pr.first_order.matrix), d2(pr.second_order.matrix);
  Eigen::MatrixXd b = p.lambda * pr.mass.faces.asDiagonal() * Eigen::MatrixXd(pr.noisy);
  b += p.rho1 * d.transpose() * pr.mass.edges.cwiseProduct(s.weights.edges).asDiagonal() *
       Eigen::MatrixXd(s.p - s.z_p / p.rho1);
  b += p.rho2 * d2.transpose() * pr.mass.lines.cwiseProduct(s.weights.lines).asDiagonal() *
       Eigen::MatrixXd(s.q - s.z_q / p.rho2);
  return b;
}

double brute_energy(const Mesh& m, const Field3& n, const Field3& n0, const DynamicWeights& w,
                    const DenoiseParams& p) {
  const Geometry g = compute_geometry(m);
  double data = 0.0;
  for (int f = 0; f < m.num_faces(); ++f) data += g.face_area[f] * (n.row(f) - n0.row(f)).squaredNorm();
  double first = 0.0;
  for (int e = 0; e < m.num_edges(); ++e) {
    if (m.is_boundary_edge(e)) continue;
    const auto& ef = m.edge_faces(e);
    first += w.edges[e] * (n.row(ef[0]) - n.row(ef[1])).lpNorm<1>() * g.edge_length[e];
  }
  double second = 0.0;
  for (int l = 0; l < m.num_lines(); ++l) {
    const Line& line = m.lines()[l];
    if (line.on_boundary()) continue;
    const double jump = (n.row(line.face_in) - 2.0 * n.row(line.face) + n.row(line.face_out)).norm();
    if (jump > kL0ZeroTolerance) second += w.lines[l] * g.line_length[l];
  }
  return 0.5 * p.lambda * data + p.alpha * first + p.beta * second;
}

}  // namespace

TEST_CASE("dynamic weight examples") {
  const Mesh two = two_triangles();
  Field3 n(2, 3);
  n << 1, 0, 0, 0, 1, 0;
  DynamicWeights w = compute_dynamic_weights(two, n, 1.0, 1.0);
  for (int e = 0; e < two.num_edges(); ++e) {
    CHECK(w.edges[e] == doctest::Approx(two.is_boundary_edge(e) ? 1.0 : std::exp(-1.0)).epsilon(1e-14));
  }
  CHECK(std::exp(-1.0) == doctest::Approx(0.3679).epsilon(1e-4));
  for (int l = 0; l < two.num_lines(); ++l) CHECK(w.lines[l] == 1.0);

  const Mesh sphere = shapes::icosphere(1);
  Field3 flat = Field3::Zero(sphere.num_faces(), 3);
  flat.col(2).setOnes();
  w = compute_dynamic_weights(sphere, flat, 0.3, 0.5);
  CHECK(w.edges.minCoeff() == 1.0);
  CHECK(w.lines.minCoeff() == 1.0);

  const Line& line = sphere.lines()[0];
  flat.row(line.face_in) << 0, 1, 0;
  flat.row(line.face) << 1, 0, 0;
  flat.row(line.face_out) << 1, 0, 0;
  w = compute_dynamic_weights(sphere, flat, 1.0, 1.0);
  CHECK(w.lines[0] == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
  CHECK(std::exp(-2.0) == doctest::Approx(0.1353).epsilon(1e-3));
  CHECK(w.lines.maxCoeff() <= 1.0);
  CHECK(w.lines.minCoeff() > 0.0);
}

TEST_CASE("n_step with both regularizers off normalizes the input") {
  testing::Rng rng(3);
  const Mesh m = shapes::icosphere(1);
  const Field3 n0 = testing::random_field(rng, m.num_faces());
  const NormalProblem pr = NormalProblem::build(m, n0, true);
  DenoiseParams p;
  p.alpha = 0.0;
  p.beta = 0.0;
  const AdmmState s = random_state(rng, m);
  const Field3 n = n_step(s, n0, pr, p);
  Field3 expected = n0;
  expected.rowwise().normalize();
  CHECK((n - expected).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("n_step keeps a constant field") {
  const Mesh m = shapes::cube_grid(2);
  Field3 n0(m.num_faces(), 3);
  n0.rowwise() = Eigen::RowVector3d(0.0, 0.6, 0.8);
  const NormalProblem pr = NormalProblem::build(m, n0, true);
  const Field3 n = n_step(AdmmState::zeros(m), n0, pr, DenoiseParams{});
  CHECK((n - n0).cwiseAbs().maxCoeff() == 0.0);
  const Field3 from_zero = n_step(AdmmState::zeros(m), Field3::Zero(m.num_faces(), 3), pr, DenoiseParams{});
  CHECK((from_zero - n0).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("n_step matches a dense solve") {
  testing::Rng rng(5);
  for (int trial = 0; trial < 4; ++trial) {
    const Mesh m = trial % 2 ? shapes::unit_cube() : testing::random_closed_mesh(rng, trial);
    const Field3 n0 = testing::random_unit_field(rng, m.num_faces());
    const NormalProblem pr = NormalProblem::build(m, n0, trial % 2 == 0);
    DenoiseParams p = random_params(rng);
    p.cg_tol = 1e-13;
    const AdmmState s = random_state(rng, m);
    const Eigen::MatrixXd x = dense_system(pr, s.weights, p).lu().solve(dense_rhs(pr, s, p));
    Field3 expected = x;
    expected.rowwise().normalize();
    const Field3 n = n_step(s, n0, pr, p);
    CHECK((n - expected).cwiseAbs().maxCoeff() <= 1e-8);
    for (int f = 0; f < n.rows(); ++f) CHECK(std::abs(n.row(f).norm() - 1.0) <= 1e-10);
    // sparse assembly agrees with the dense one
    const Eigen::MatrixXd sparse(normal_system_matrix(pr, s.weights, p));
    CHECK((sparse - dense_system(pr, s.weights, p)).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("system matrix is symmetric positive definite") {
  testing::Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const Mesh m = testing::random_closed_mesh(rng, trial);
    if (m.num_faces() > 200) continue;
    const NormalProblem pr = NormalProblem::build(m, testing::random_unit_field(rng, m.num_faces()), true);
    const DenoiseParams p = random_params(rng);
    const Eigen::MatrixXd a(normal_system_matrix(pr, random_weights(rng, m), p));
    CHECK((a - a.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(a.llt().info() == Eigen::Success);
  }
}

TEST_CASE("conjugate gradient") {
  testing::Rng rng(9);
  const Mesh m = shapes::icosphere(1);
  const NormalProblem pr = NormalProblem::build(m, testing::random_unit_field(rng, m.num_faces()), true);
  const auto a = normal_system_matrix(pr, unit_weights(m), DenoiseParams{});
  const Eigen::VectorXd b = testing::random_vector(rng, m.num_faces());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(m.num_faces());
  const CgReport report = conjugate_gradient(a, b, x, 1e-12, 1000);
  CHECK(report.converged);
  CHECK(report.relative_residual <= 1e-12);
  const Eigen::VectorXd exact = Eigen::MatrixXd(a).llt().solve(b);
  CHECK((x - exact).cwiseAbs().maxCoeff() <= 1e-9);

  Eigen::VectorXd zero = testing::random_vector(rng, m.num_faces());
  CHECK(conjugate_gradient(a, Eigen::VectorXd::Zero(m.num_faces()), zero, 1e-8, 10).converged);
  CHECK(zero.cwiseAbs().maxCoeff() == 0.0);

  Eigen::VectorXd capped = Eigen::VectorXd::Zero(m.num_faces());
  CHECK_FALSE(conjugate_gradient(a, b, capped, 1e-14, 1).converged);
}

TEST_CASE("soft threshold examples and grid oracle") {
  CHECK(soft_threshold(2.0, 0.5) == 1.5);
  CHECK(soft_threshold(-0.3, 0.5) == 0.0);
  CHECK(soft_threshold(-2.0, 0.5) == -1.5);
  testing::Rng rng(11);
  std::uniform_real_distribution<double> ux(-3.0, 3.0), ut(0.0, 2.0);
  const double step = 1e-4;
  for (int i = 0; i < 200; ++i) {
    const double x = ux(rng), t = ut(rng);
    double best = 0.0, best_value = INFINITY;
    for (double p = -3.5; p <= 3.5; p += step) {
      const double value = t * std::abs(p) + 0.5 * (p - x) * (p - x);
      if (value < best_value) {
        best_value = value;
        best = p;
      }
    }
    CHECK(std::abs(soft_threshold(x, t) - best) <= step);
  }
}

TEST_CASE("hard threshold examples") {
  CHECK(hard_threshold(Vec3(0.1, 0, 0), 0.2) == Vec3::Zero());
  const Vec3 big(3, 4, 0);
  CHECK(hard_threshold(big, 0.2) == big);
  CHECK(l0_threshold(0.5, 4.0) == doctest::Approx(0.5));
}

TEST_CASE("p_step and q_step threshold the shifted jumps") {
  testing::Rng rng(13);
  const Mesh m = shapes::icosphere(1);
  const Field3 n = testing::random_unit_field(rng, m.num_faces());
  const NormalProblem pr = NormalProblem::build(m, n, true);
  const AdmmState s = random_state(rng, m);
  DenoiseParams p = random_params(rng);

  const Field3 xp = pr.first_order.apply(n) + s.z_p / p.rho1;
  const Field3 pe = p_step(s, n, pr, p);
  for (int e = 0; e < m.num_edges(); ++e) {
    for (int c = 0; c < 3; ++c) {
      CHECK(std::abs(pe(e, c) - soft_threshold(xp(e, c), s.weights.edges[e] * p.alpha / p.rho1)) <= 1e-12);
    }
  }
  const Field3 xq = pr.second_order.apply(n) + s.z_q / p.rho2;
  const Field3 q = q_step(s, n, pr, p);
  for (int l = 0; l < m.num_lines(); ++l) {
    const double cost = s.weights.lines[l] * p.beta / p.rho2;
    const bool keep = cost < 0.5 * xq.row(l).squaredNorm();
    if (keep) {
      CHECK((q.row(l) - xq.row(l)).cwiseAbs().maxCoeff() <= 1e-12);
    } else {
      CHECK(q.row(l).isZero(0.0));
    }
  }
}

TEST_CASE("dual step") {
  testing::Rng rng(17);
  const Mesh m = shapes::icosphere(1);
  const Field3 n = testing::random_unit_field(rng, m.num_faces());
  const NormalProblem pr = NormalProblem::build(m, n, true);
  DenoiseParams p;
  p.rho1 = 1.5;
  p.rho2 = 0.5;

  AdmmState s = AdmmState::zeros(m);
  s.p = pr.first_order.apply(n);
  s.q = pr.second_order.apply(n);
  s.z_p = testing::random_field(rng, m.num_edges());
  const Field3 before = s.z_p;
  dual_step(s, n, pr, p);
  CHECK(s.z_p == before);
  CHECK(s.z_q.isZero(0.0));

  AdmmState z = AdmmState::zeros(m);
  const Field3 r = pr.first_order.apply(n);
  dual_step(z, n, pr, p);
  CHECK((z.z_p - p.rho1 * r).cwiseAbs().maxCoeff() <= 1e-15);
  dual_step(z, n, pr, p);
  CHECK((z.z_p - 2.0 * p.rho1 * r).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((z.z_q - 2.0 * p.rho2 * pr.second_order.apply(n)).cwiseAbs().maxCoeff() <= 1e-14);

  p.beta = 0.0;
  AdmmState off = AdmmState::zeros(m);
  dual_step(off, n, pr, p);
  CHECK(off.z_q.isZero(0.0));
}

TEST_CASE("energy examples") {
  const Mesh cube = shapes::cube_grid(2);
  Field3 n0(cube.num_faces(), 3);
  n0.rowwise() = Eigen::RowVector3d(1, 0, 0);
  NormalProblem pr = NormalProblem::build(cube, n0, false);
  CHECK(energy(n0, pr, unit_weights(cube), DenoiseParams{}) == 0.0);

  const Mesh two = two_triangles();
  Field3 crease(2, 3);
  crease << 1, 0, 0, 0, 1, 0;
  pr = NormalProblem::build(two, crease, false);
  DenoiseParams p;
  p.alpha = 0.7;
  DynamicWeights w = unit_weights(two);
  int interior = 0;
  for (int e = 0; e < two.num_edges(); ++e) {
    if (!two.is_boundary_edge(e)) interior = e;
  }
  w.edges[interior] = 0.25;
  const double jump = 2.0;  // |(1,-1,0)|_1
  CHECK(energy(crease, pr, w, p) == doctest::Approx(p.alpha * 0.25 * jump * std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("energy matches a direct summation") {
  testing::Rng rng(19);
  for (int trial = 0; trial < 6; ++trial) {
    const Mesh m = trial == 5 ? shapes::planar_grid(4) : testing::random_closed_mesh(rng, trial);
    const Field3 n0 = testing::random_unit_field(rng, m.num_faces());
    Field3 n = testing::random_unit_field(rng, m.num_faces());
    n.row(0) = n.row(1);  // some exact zeros in the jumps
    const NormalProblem pr = NormalProblem::build(m, n0, false);
    const DenoiseParams p = random_params(rng);
    const DynamicWeights w = random_weights(rng, m);
    const double expected = brute_energy(m, n, n0, w, p);
    CHECK(std::abs(energy(n, pr, w, p) - expected) <= 1e-12 * std::max(1.0, std::abs(expected)));
  }
}

TEST_CASE("outer loop honours max_iterations") {
  testing::Rng rng(23);
  const Mesh m = add_gaussian_noise(shapes::cube_grid(3), {0.1, NoiseDirection::kRandom, 1});
  DenoiseParams p;
  p.eps = 0.0;
  p.max_iterations = 5;
  const DenoiseResult r = denoise_normals(m, face_normals(m), p);
  CHECK(r.diagnostics.size() == 5);
  CHECK(r.diagnostics.back().iteration == 5);
  for (int f = 0; f < r.normals.rows(); ++f) CHECK(std::abs(r.normals.row(f).norm() - 1.0) <= 1e-10);

  p.max_iterations = 0;
  const DenoiseResult none = denoise_normals(m, face_normals(m), p);
  CHECK(none.diagnostics.empty());
  CHECK(none.normals == face_normals(m));
}

TEST_CASE("disabled blocks leave no trace") {
  const Mesh m = add_gaussian_noise(shapes::cube_grid(3), {0.15, NoiseDirection::kRandom, 2});
  const Field3 n0 = face_normals(m);
  DenoiseParams a;
  a.beta = 0.0;
  a.max_iterations = 15;
  DenoiseParams b = a;
  b.rho2 = 123.0;
  b.sigma_l = 9.0;
  const DenoiseResult ra = denoise_normals(m, n0, a), rb = denoise_normals(m, n0, b);
  REQUIRE(ra.diagnostics.size() == rb.diagnostics.size());
  for (std::size_t i = 0; i < ra.diagnostics.size(); ++i) {
    CHECK(ra.diagnostics[i].energy == rb.diagnostics[i].energy);
    CHECK(ra.diagnostics[i].residual_q == 0.0);
  }
  CHECK(ra.normals == rb.normals);

  // with beta = 0 the energy has no second-order part
  const NormalProblem pr = NormalProblem::build(m, n0, true);
  DenoiseParams tv = a;
  tv.alpha = 0.0;
  CHECK(energy(ra.normals, pr, unit_weights(m), tv) ==
        doctest::Approx(0.5 * tv.lambda * inner_product(Space::kU, Field3(ra.normals - n0), Field3(ra.normals - n0), pr.mass)));
}

TEST_CASE("runs are bit identical") {
  const Mesh m = add_gaussian_noise(shapes::beveled_cube(4), {0.2, NoiseDirection::kRandom, 3});
  DenoiseParams p;
  p.max_iterations = 20;
  const DenoiseResult a = denoise_normals(m, face_normals(m), p);
  const DenoiseResult b = denoise_normals(m, face_normals(m), p);
  std::ostringstream sa, sb;
  write_diagnostics_csv(a.diagnostics, sa);
  write_diagnostics_csv(b.diagnostics, sb);
  CHECK(sa.str() == sb.str());
  CHECK(a.normals == b.normals);
}

TEST_CASE("primal residuals shrink with frozen weights") {
  const Mesh m = add_gaussian_noise(shapes::cube_grid(4), {0.15, NoiseDirection::kRandom, 4});
  DenoiseParams p;
  p.weight_update = WeightUpdate::kFrozen;
  p.eps = 0.0;
  p.max_iterations = 50;
  const DenoiseResult r = denoise_normals(m, face_normals(m), p);
  REQUIRE(r.diagnostics.size() == 50);
  CHECK(r.diagnostics[49].residual_p < r.diagnostics[0].residual_p);
  CHECK(r.diagnostics[49].residual_q < r.diagnostics[0].residual_q);
}

TEST_CASE("clean input stays put") {
  for (const Mesh& m : {shapes::unit_cube(), shapes::cube_grid(6)}) {
    const Field3 n = face_normals(m);
    for (NormalInit init : {NormalInit::kNoisy, NormalInit::kZero}) {
      DenoiseParams p;
      p.init = init;
      const DenoiseResult r = denoise_normals(m, n, p);
      CHECK(mean_angular_difference(r.normals, n) < 0.5);
    }
  }
}

TEST_CASE("filtering reduces the normal error") {
  const Mesh clean = shapes::cube_grid(6);
  const Mesh noisy = add_gaussian_noise(clean, {0.2, NoiseDirection::kRandom, 5});
  DenoiseParams p;
  p.sigma_e = 2.0;
  p.sigma_l = 1.0;
  const DenoiseResult r = denoise_normals(noisy, face_normals(noisy), p);
  const double before = mean_angular_difference(face_normals(noisy), face_normals(clean));
  CHECK(mean_angular_difference(r.normals, face_normals(clean)) < 0.5 * before);
}

TEST_CASE("invalid parameters and inputs") {
  const Mesh m = shapes::unit_cube();
  const Field3 n = face_normals(m);
  auto code_of = [&](DenoiseParams p, const Field3& input) {
    try {
      denoise_normals(m, input, p);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kEmptyMesh;  // no error
  };
  DenoiseParams bad;
  bad.lambda = 0.0;
  CHECK(code_of(bad, n) == ErrorCode::kInvalidArgument);
  bad = {};
  bad.rho1 = -1.0;
  CHECK(code_of(bad, n) == ErrorCode::kInvalidArgument);
  bad = {};
  bad.alpha = -0.1;
  CHECK(code_of(bad, n) == ErrorCode::kInvalidArgument);
  bad = {};
  bad.sigma_e = 0.0;
  CHECK(code_of(bad, n) == ErrorCode::kInvalidArgument);
  CHECK(code_of({}, Field3(n.topRows(5))) == ErrorCode::kLengthMismatch);
  Field3 nan = n;
  nan(3, 1) = NAN;
  CHECK(code_of({}, nan) == ErrorCode::kNonFiniteValue);

  const Mesh noisy = add_gaussian_noise(shapes::cube_grid(4), {0.2, NoiseDirection::kRandom, 6});
  DenoiseParams tight;
  tight.cg_tol = 1e-15;
  tight.cg_max_iterations = 1;
  try {
    denoise_normals(noisy, face_normals(noisy), tight);
    FAIL("expected divergence");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSolverDiverged);
  }
}

TEST_CASE("diagnostics csv") {
  std::vector<IterationStats> stats(2);
  stats[0] = {1, 2.5, 0.25, 0.125, 1e-3, 4};
  stats[1] = {2, 2.0, 0.0, 0.0, 0.0, 3};
  std::ostringstream out;
  write_diagnostics_csv(stats, out);
  CHECK(out.str() == "iter,energy,res_P,res_Q,dN\n1,2.5,0.25,0.125,0.001\n2,2,0,0,0\n");
}
