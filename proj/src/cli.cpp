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

#include "semisparse/cli.h"

#include "semisparse/ablation.h"
#include "semisparse/admm.h"
#include "semisparse/error.h"
#include "semisparse/mesh_io.h"
#include "semisparse/metrics.h"
#include "semisparse/vertex_update.h"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace semisparse::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

struct SolverOptions {
  DenoiseParams params;
  int vertex_iterations = kDefaultVertexIterations;
  std::string weight_update = "dynamic";
  std::string init = "noisy";
  std::string params_file;
};

void add_solver_flags(CLI::App& cmd, SolverOptions& o) {
  DenoiseParams& p = o.params;
  cmd.add_option("--lambda", p.lambda, "data fidelity weight")->capture_default_str();
  cmd.add_option("--alpha", p.alpha, "first-order L1 weight")->capture_default_str();
  cmd.add_option("--beta", p.beta, "second-order L0 weight")->capture_default_str();
  cmd.add_option("--rho1", p.rho1, "first-order penalty")->capture_default_str();
  cmd.add_option("--rho2", p.rho2, "second-order penalty")->capture_default_str();
  cmd.add_option("--sigma-e", p.sigma_e, "edge weight scale")->capture_default_str();
  cmd.add_option("--sigma-l", p.sigma_l, "line weight scale")->capture_default_str();
  cmd.add_option("--eps", p.eps, "stop tolerance on |N^k - N^k-1|^2 (negative: 1e-8 |T|)")
      ->capture_default_str();
  cmd.add_option("--max-iters", p.max_iterations, "outer ADMM iterations")->capture_default_str();
  cmd.add_option("--cg-tol", p.cg_tol, "relative CG residual")->capture_default_str();
  cmd.add_option("--cg-max-iters", p.cg_max_iterations, "CG iteration cap (0: 10 |T|)")
      ->capture_default_str();
  cmd.add_option("--vertex-iters", o.vertex_iterations, "vertex update sweeps")
      ->capture_default_str();
  cmd.add_option("--weight-update", o.weight_update, "dynamic or frozen")
      ->check(CLI::IsMember({"dynamic", "frozen"}))
      ->capture_default_str();
  cmd.add_option("--init", o.init, "initial normals: noisy or zero")
      ->check(CLI::IsMember({"noisy", "zero"}))
      ->capture_default_str();
  cmd.add_option("--params", o.params_file, "key=value file overriding the flags");
}

// Applies a key=value file on top of the parsed flags.
void apply_params_file(SolverOptions& o) {
  if (o.params_file.empty()) return;
  std::ifstream in(o.params_file);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + o.params_file);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    line = line.substr(0, line.find('#'));
    const auto eq = line.find('=');
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
    };
    if (trim(line).empty()) continue;
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kParseError,
                  o.params_file + ":" + std::to_string(number) + ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    if (key.rfind("--", 0) == 0) key = key.substr(2);
    const std::string value = trim(line.substr(eq + 1));
    if (key == "weight-update" || key == "weight_update") {
      if (value != "dynamic" && value != "frozen") {
        throw Error(ErrorCode::kParseError, "weight-update must be dynamic or frozen");
      }
      o.weight_update = value;
      continue;
    }
    if (key == "init") {
      if (value != "noisy" && value != "zero") {
        throw Error(ErrorCode::kParseError, "init must be noisy or zero");
      }
      o.init = value;
      continue;
    }
    double v = 0.0;
    const auto r = std::from_chars(value.data(), value.data() + value.size(), v);
    if (value.empty() || r.ec != std::errc() || r.ptr != value.data() + value.size()) {
      throw Error(ErrorCode::kParseError,
                  o.params_file + ":" + std::to_string(number) + ": bad number '" + value + "'");
    }
    if (key == "vertex-iters" || key == "vertex_iters") {
      o.vertex_iterations = static_cast<int>(v);
    } else {
      set_parameter(o.params, key, v);
    }
  }
}

DenoiseParams finalize(SolverOptions& o) {
  apply_params_file(o);
  o.params.weight_update =
      o.weight_update == "frozen" ? WeightUpdate::kFrozen : WeightUpdate::kEveryIteration;
  o.params.init = o.init == "zero" ? NormalInit::kZero : NormalInit::kNoisy;
  o.params.validate();
  if (o.vertex_iterations < 0) throw Error(ErrorCode::kInvalidArgument, "vertex-iters must be >= 0");
  return o.params;
}

Mesh read_mesh(const std::string& path, bool triangulate) {
  return to_mesh(load_mesh(path, LoadOptions{triangulate}));
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Semi-sparse mesh denoising"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");

  int threads = 0;
  bool triangulate = false;
  int precision = 9;
  app.add_option("--threads", threads, "cap on worker threads (0: runtime default)");
  app.add_flag("--triangulate", triangulate, "fan-triangulate polygonal input");
  app.add_option("--precision", precision, "significant digits written (min 6)")
      ->capture_default_str();

  // add-noise
  auto* noise_cmd = app.add_subcommand("add-noise", "perturb vertices with Gaussian noise");
  std::string noise_in, noise_out, noise_dir = "random";
  double sigma = 0.0;
  std::uint64_t seed = 0;
  noise_cmd->add_option("input", noise_in, "input mesh")->required();
  noise_cmd->add_option("-o,--output", noise_out, "output mesh")->required();
  noise_cmd->add_option("--sigma", sigma, "std. dev. in units of the mean edge length")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  noise_cmd->add_option("--seed", seed, "random seed")->capture_default_str();
  noise_cmd->add_option("--noise-dir", noise_dir, "random or normal")
      ->check(CLI::IsMember({"random", "normal"}))
      ->capture_default_str();

  // denoise
  auto* denoise_cmd = app.add_subcommand("denoise", "filter normals, then refit vertices");
  std::string den_in, den_out, diag_path, error_map, den_reference;
  SolverOptions den_opts;
  denoise_cmd->add_option("input", den_in, "noisy mesh")->required();
  denoise_cmd->add_option("-o,--output", den_out, "denoised mesh")->required();
  denoise_cmd->add_option("--diag", diag_path, "per-iteration diagnostics CSV");
  denoise_cmd->add_option("--error-map", error_map, "PLY colored by angular error");
  denoise_cmd->add_option("--reference", den_reference, "ground-truth mesh");
  add_solver_flags(*denoise_cmd, den_opts);

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "angular and vertex error against a reference");
  std::string eval_in, eval_reference;
  std::optional<double> eval_sigma;
  bool eval_header = false;
  eval_cmd->add_option("input", eval_in, "mesh to score")->required();
  eval_cmd->add_option("--reference", eval_reference, "ground-truth mesh")->required();
  eval_cmd->add_option("--sigma", eval_sigma, "noise level, echoed in the CSV");
  eval_cmd->add_flag("--header", eval_header, "print the CSV header first");

  // ablate
  auto* ablate_cmd = app.add_subcommand("ablate", "compare full, beta=0 and alpha=0 filters");
  std::string abl_in, abl_reference, grid_text;
  SolverOptions abl_opts;
  ablate_cmd->add_option("input", abl_in, "noisy mesh")->required();
  ablate_cmd->add_option("--reference", abl_reference, "ground-truth mesh")->required();
  ablate_cmd->add_option("--grid", grid_text, "fixed grid, e.g. \"alpha=0.2,0.4;beta=0.1,0.3\"");
  add_solver_flags(*ablate_cmd, abl_opts);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return 2;
  }

#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#endif
  const WriteOptions write_options{precision};

  try {
    if (*noise_cmd) {
      const Mesh mesh = read_mesh(noise_in, triangulate);
      NoiseSpec spec;
      spec.sigma_rel = sigma;
      spec.seed = seed;
      spec.direction = noise_dir == "normal" ? NoiseDirection::kNormal : NoiseDirection::kRandom;
      write_mesh(to_raw(add_gaussian_noise(mesh, spec)), noise_out, write_options);
      return 0;
    }

    if (*denoise_cmd) {
      if (!error_map.empty() && den_reference.empty()) {
        throw UsageError("--error-map requires --reference");
      }
      const DenoiseParams params = finalize(den_opts);
      const Mesh noisy = read_mesh(den_in, triangulate);
      const DenoiseResult result = denoise_normals(noisy, face_normals(noisy), params);
      const VertexUpdateResult update =
          update_vertices(noisy, result.normals, den_opts.vertex_iterations);
      const Mesh denoised = noisy.with_positions(update.positions);
      write_mesh(to_raw(denoised), den_out, write_options);
      if (!diag_path.empty()) write_diagnostics_csv(result.diagnostics, diag_path);

      out << "iterations " << result.diagnostics.size() << "\n";
      if (update.flipped_faces > 0) {
        err << "warning: " << update.flipped_faces << " faces flipped during vertex update\n";
      }
      if (result.near_zero_normals > 0) {
        err << "warning: " << result.near_zero_normals
            << " near-zero normals kept their previous value\n";
      }
      if (!den_reference.empty()) {
        const Mesh reference = read_mesh(den_reference, triangulate);
        const std::vector<double> angles =
            angular_differences(result.normals, face_normals(reference));
        double mean = 0.0;
        for (double a : angles) mean += a;
        mean /= static_cast<double>(std::max<std::size_t>(angles.size(), 1));
        out << "theta_deg " << fmt(mean) << "\n";
        if (!error_map.empty()) write_error_map(denoised, angles, error_map, kDefaultErrorClampDegrees, write_options);
      }
      return 0;
    }

    if (*eval_cmd) {
      const Mesh mesh = read_mesh(eval_in, triangulate);
      const Mesh reference = read_mesh(eval_reference, triangulate);
      double theta = std::numeric_limits<double>::quiet_NaN();
      if (mesh.num_faces() == reference.num_faces()) {
        theta = mean_angular_difference(face_normals(mesh), face_normals(reference));
      } else {
        err << "warning: face counts differ, theta not computed\n";
      }
      const double ev = vertex_error(mesh, reference);
      if (eval_header) out << "mesh,sigma_rel,theta_deg,e_v\n";
      out << eval_in << ',' << (eval_sigma ? fmt(*eval_sigma) : std::string()) << ','
          << fmt(theta) << ',' << fmt(ev) << "\n";
      return 0;
    }

    if (*ablate_cmd) {
      const DenoiseParams base = finalize(abl_opts);
      const ParameterGrid grid = parse_grid(grid_text);
      const Mesh noisy = read_mesh(abl_in, triangulate);
      const Mesh reference = read_mesh(abl_reference, triangulate);
      const Field3 reference_normals = face_normals(reference);
      out << "config,lambda,alpha,beta,rho1,rho2,theta_deg,e_v,iterations,grid_points\n";
      out << "noisy,,,,,," << fmt(mean_angular_difference(face_normals(noisy), reference_normals))
          << ',' << fmt(vertex_error(noisy, reference)) << ",0,0\n";
      for (Variant v : {Variant::kFull, Variant::kNoSecondOrder, Variant::kNoFirstOrder}) {
        const AblationEntry best = tune_variant(noisy, reference_normals, base, v, grid);
        const DenoiseResult result = denoise_normals(noisy, face_normals(noisy), best.params);
        const VertexUpdateResult update =
            update_vertices(noisy, result.normals, abl_opts.vertex_iterations);
        const double ev = vertex_error(noisy.with_positions(update.positions), reference);
        const DenoiseParams& p = best.params;
        out << to_string(v) << ',' << fmt(p.lambda) << ',' << fmt(p.alpha) << ',' << fmt(p.beta)
            << ',' << fmt(p.rho1) << ',' << fmt(p.rho2) << ',' << fmt(best.theta) << ','
            << fmt(ev) << ',' << best.iterations << ',' << best.evaluated << "\n";
      }
      return 0;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

int dispatch(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dispatch(args, std::cout, std::cerr);
}

}  // namespace semisparse::cli
