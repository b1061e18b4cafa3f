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

#include "semisparse/admm.h"
#include "semisparse/mesh.h"

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace semisparse {

enum class Variant {
  kFull,           // both regularizers
  kNoSecondOrder,  // beta = 0, first-order (TV-like) only
  kNoFirstOrder,   // alpha = 0, second-order L0 only
};

const char* to_string(Variant variant);

/// Cartesian product of values per parameter name (see set_parameter).
struct ParameterGrid {
  std::vector<std::pair<std::string, std::vector<double>>> axes;

  std::size_t size() const;
  /// Parameter sets in row-major order over `axes`, applied on top of `base`.
  std::vector<DenoiseParams> expand(const DenoiseParams& base) const;
};

/// Sets lambda, alpha, beta, rho1, rho2, sigma_e, sigma_l, eps, max_iters,
/// cg_tol or cg_max_iters ('-' and '_' interchangeable). Throws kInvalidArgument.
void set_parameter(DenoiseParams& params, std::string_view key, double value);

/// Parses "alpha=0.2,0.4;beta=0.1". Throws kInvalidArgument.
ParameterGrid parse_grid(std::string_view text);

struct AblationEntry {
  Variant variant = Variant::kFull;
  DenoiseParams params;
  double theta = 0.0;  // degrees, filtered normals vs reference normals
  int iterations = 0;
  int evaluated = 0;   // grid points tried
};

/// Runs `variant` at every grid point (its disabled weight forced to zero) and
/// keeps the point with the lowest mean angular difference to `reference`.
AblationEntry tune_variant(const Mesh& noisy, const Field3& reference, const DenoiseParams& base,
                           Variant variant, const ParameterGrid& grid);

}  // namespace semisparse
