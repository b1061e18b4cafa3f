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

#include "semisparse/ablation.h"

#include "semisparse/error.h"
#include "semisparse/metrics.h"

#include <charconv>
#include <limits>

namespace semisparse {

namespace {

std::string normalize_key(std::string_view key) {
  std::string k(key);
  for (char& c : k) {
    if (c == '-') c = '_';
  }
  return k;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

const char* to_string(Variant variant) {
  switch (variant) {
    case Variant::kFull: return "full";
    case Variant::kNoSecondOrder: return "beta=0";
    case Variant::kNoFirstOrder: return "alpha=0";
  }
  return "unknown";
}

std::size_t ParameterGrid::size() const {
  std::size_t n = 1;
  for (const auto& axis : axes) n *= axis.second.size();
  return n;
}

std::vector<DenoiseParams> ParameterGrid::expand(const DenoiseParams& base) const {
  std::vector<DenoiseParams> out{base};
  for (const auto& [key, values] : axes) {
    std::vector<DenoiseParams> next;
    next.reserve(out.size() * values.size());
    for (const DenoiseParams& p : out) {
      for (double v : values) {
        DenoiseParams q = p;
        set_parameter(q, key, v);
        next.push_back(q);
      }
    }
    out = std::move(next);
  }
  return out;
}

void set_parameter(DenoiseParams& params, std::string_view key, double value) {
  const std::string k = normalize_key(key);
  if (k == "lambda") params.lambda = value;
  else if (k == "alpha") params.alpha = value;
  else if (k == "beta") params.beta = value;
  else if (k == "rho1") params.rho1 = value;
  else if (k == "rho2") params.rho2 = value;
  else if (k == "sigma_e") params.sigma_e = value;
  else if (k == "sigma_l") params.sigma_l = value;
  else if (k == "eps") params.eps = value;
  else if (k == "max_iters") params.max_iterations = static_cast<int>(value);
  else if (k == "cg_tol") params.cg_tol = value;
  else if (k == "cg_max_iters") params.cg_max_iterations = static_cast<int>(value);
  else throw Error(ErrorCode::kInvalidArgument, "unknown parameter '" + std::string(key) + "'");
}

ParameterGrid parse_grid(std::string_view text) {
  ParameterGrid grid;
  while (!text.empty()) {
    const auto semi = text.find(';');
    const std::string_view item = trim(text.substr(0, semi));
    text = semi == std::string_view::npos ? std::string_view{} : text.substr(semi + 1);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kInvalidArgument, "grid axis '" + std::string(item) + "' lacks '='");
    }
    std::string key(trim(item.substr(0, eq)));
    DenoiseParams probe;
    set_parameter(probe, key, 0.0);  // rejects unknown names early
    std::vector<double> values;
    std::string_view list = item.substr(eq + 1);
    while (!list.empty()) {
      const auto comma = list.find(',');
      const std::string_view token = trim(list.substr(0, comma));
      list = comma == std::string_view::npos ? std::string_view{} : list.substr(comma + 1);
      double v = 0.0;
      const auto r = std::from_chars(token.data(), token.data() + token.size(), v);
      if (token.empty() || r.ec != std::errc() || r.ptr != token.data() + token.size()) {
        throw Error(ErrorCode::kInvalidArgument, "bad grid value '" + std::string(token) + "'");
      }
      values.push_back(v);
    }
    if (values.empty()) throw Error(ErrorCode::kInvalidArgument, "empty grid axis " + key);
    grid.axes.emplace_back(std::move(key), std::move(values));
  }
  return grid;
}

AblationEntry tune_variant(const Mesh& noisy, const Field3& reference, const DenoiseParams& base,
                           Variant variant, const ParameterGrid& grid) {
  const Field3 noisy_normals = face_normals(noisy);
  AblationEntry best;
  best.variant = variant;
  best.theta = std::numeric_limits<double>::infinity();
  for (DenoiseParams params : grid.expand(base)) {
    if (variant == Variant::kNoSecondOrder) params.beta = 0.0;
    if (variant == Variant::kNoFirstOrder) params.alpha = 0.0;
    const DenoiseResult result = denoise_normals(noisy, noisy_normals, params);
    const double theta = mean_angular_difference(result.normals, reference);
    ++best.evaluated;
    if (theta < best.theta) {
      best.theta = theta;
      best.params = params;
      best.iterations = static_cast<int>(result.diagnostics.size());
    }
  }
  return best;
}

}  // namespace semisparse
