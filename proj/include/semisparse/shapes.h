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

namespace semisparse::shapes {

/// [0,1]^3 split into 12 triangles.
Mesh unit_cube();

/// Surface of [-1,1]^3 with each side split into n x n quads (12 n^2 triangles).
Mesh cube_grid(int n);

/// Unit sphere from a subdivided icosahedron (20 * 4^subdivisions triangles).
Mesh icosphere(int subdivisions);

/// Flat n x n quad grid on [0,1]^2 in the plane z = 0, split into triangles.
Mesh planar_grid(int n);

/// CAD-like test part: the box [-1,1]^3 with its four vertical edges rounded
/// (radius `fillet`) and the eight horizontal edges cut by 45-degree chamfers
/// of depth `chamfer`. A cube_grid(n) is pushed radially onto that surface, so
/// the mesh has flat faces, curved fillets, sharp creases and conical corners.
Mesh beveled_cube(int n, double fillet = 0.35, double chamfer = 0.25);

}  // namespace semisparse::shapes
