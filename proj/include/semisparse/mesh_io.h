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

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace semisparse {

enum class MeshFormat { kObj, kOff, kPly };

using Rgb = std::array<std::uint8_t, 3>;

/// Mesh as it appears in a file: 0-based triangles, no topology.
struct RawMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
  std::vector<Rgb> face_colors;  // empty or one per face
};

struct LoadOptions {
  /// Fan-triangulate polygons instead of rejecting them.
  bool triangulate = false;
};

struct WriteOptions {
  /// Significant digits for coordinates; values below 6 are raised to 6.
  int precision = 9;
};

/// Infers the format from the extension (.obj, .off, .ply).
MeshFormat format_from_path(const std::filesystem::path& path);

/// Throws kParseError (with line number), kUnsupportedElement (binary PLY),
/// kNonTriangleFace, kIndexOutOfRange or kIoError.
RawMesh load_mesh(const std::filesystem::path& path, MeshFormat format, LoadOptions options = {});
RawMesh load_mesh(const std::filesystem::path& path, LoadOptions options = {});

/// Throws kEmptyMesh or kIoError. Face colors are written for PLY only.
void write_mesh(const RawMesh& mesh, const std::filesystem::path& path, MeshFormat format,
                WriteOptions options = {});
void write_mesh(const RawMesh& mesh, const std::filesystem::path& path, WriteOptions options = {});

RawMesh to_raw(const Mesh& mesh);
Mesh to_mesh(const RawMesh& raw);

inline constexpr double kDefaultErrorClampDegrees = 60.0;

/// Color for an angular error: linear blend from blue (0,0,255) at 0 degrees to
/// red (255,0,0) at `clamp_max` and beyond; channels rounded to nearest.
Rgb error_ramp(double angle_degrees, double clamp_max = kDefaultErrorClampDegrees);

/// Writes an ASCII PLY with one ramp color per face. Throws kLengthMismatch.
void write_error_map(const Mesh& mesh, std::span<const double> angles_degrees,
                     const std::filesystem::path& path,
                     double clamp_max = kDefaultErrorClampDegrees, WriteOptions options = {});

}  // namespace semisparse
