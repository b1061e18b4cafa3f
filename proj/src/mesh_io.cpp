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

#include "semisparse/mesh_io.h"

#include "semisparse/error.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <string_view>

namespace semisparse {

namespace {

std::vector<std::string_view> split(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    const std::size_t b = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > b) out.push_back(s.substr(b, i - b));
  }
  return out;
}

[[noreturn]] void parse_error(const std::filesystem::path& path, int line, const std::string& why) {
  throw Error(ErrorCode::kParseError, path.string() + ":" + std::to_string(line) + ": " + why);
}

bool parse_double(std::string_view s, double& out) {
  const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

bool parse_int(std::string_view s, long long& out) {
  const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

class LineReader {
 public:
  explicit LineReader(const std::filesystem::path& path) : path_(path), in_(path) {
    if (!in_) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  }
  bool next(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++number_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }
  int number() const { return number_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  int number_ = 0;
};

void add_polygon(RawMesh& mesh, const std::vector<int>& poly, bool triangulate,
                 const LineReader& reader) {
  if (poly.size() < 3) parse_error(reader.path(), reader.number(), "face with fewer than 3 vertices");
  if (poly.size() > 3 && !triangulate) {
    throw Error(ErrorCode::kNonTriangleFace, reader.path().string() + ":" +
                                                 std::to_string(reader.number()) + ": " +
                                                 std::to_string(poly.size()) + "-gon");
  }
  for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
    mesh.faces.push_back({poly[0], poly[k], poly[k + 1]});
  }
}

void check_indices(const RawMesh& mesh) {
  const int nv = static_cast<int>(mesh.vertices.size());
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    for (int v : mesh.faces[f]) {
      if (v < 0 || v >= nv) {
        throw Error(ErrorCode::kIndexOutOfRange,
                    "face " + std::to_string(f) + " references vertex " + std::to_string(v));
      }
    }
  }
}

RawMesh load_obj(const std::filesystem::path& path, LoadOptions options) {
  LineReader reader(path);
  RawMesh mesh;
  std::string line;
  std::vector<int> poly;
  while (reader.next(line)) {
    const auto tok = split(line);
    if (tok.empty() || tok[0][0] == '#') continue;
    if (tok[0] == "v") {
      if (tok.size() < 4) parse_error(path, reader.number(), "vertex needs 3 coordinates");
      Vec3 p;
      for (int k = 0; k < 3; ++k) {
        if (!parse_double(tok[k + 1], p[k])) parse_error(path, reader.number(), "bad coordinate");
      }
      mesh.vertices.push_back(p);
    } else if (tok[0] == "f") {
      poly.clear();
      for (std::size_t k = 1; k < tok.size(); ++k) {
        // v, v/vt, v//vn, v/vt/vn: only the position index matters.
        const std::string_view ref = tok[k].substr(0, tok[k].find('/'));
        long long idx = 0;
        if (!parse_int(ref, idx) || idx == 0) parse_error(path, reader.number(), "bad face index");
        const long long nv = static_cast<long long>(mesh.vertices.size());
        poly.push_back(static_cast<int>(idx > 0 ? idx - 1 : nv + idx));
      }
      add_polygon(mesh, poly, options.triangulate, reader);
    }
  }
  check_indices(mesh);
  return mesh;
}

// Next non-empty, non-comment line split into tokens.
bool next_tokens(LineReader& reader, std::string& line, std::vector<std::string_view>& tok) {
  while (reader.next(line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    tok = split(line);
    if (!tok.empty()) return true;
  }
  return false;
}

std::uint8_t to_channel(double c, bool unit_range) {
  const double v = unit_range ? c * 255.0 : c;
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

RawMesh load_off(const std::filesystem::path& path, LoadOptions options) {
  LineReader reader(path);
  RawMesh mesh;
  std::string line;
  std::vector<std::string_view> tok;
  if (!next_tokens(reader, line, tok) || tok[0].substr(0, 3) != "OFF") {
    parse_error(path, reader.number(), "missing OFF header");
  }
  std::vector<std::string_view> counts(tok.begin() + 1, tok.end());
  if (tok[0].size() > 3) parse_error(path, reader.number(), "unsupported OFF variant");
  std::string count_line;
  if (counts.empty()) {
    if (!next_tokens(reader, count_line, counts)) parse_error(path, reader.number(), "missing counts");
  }
  long long nv = 0, nf = 0;
  if (counts.size() < 2 || !parse_int(counts[0], nv) || !parse_int(counts[1], nf) || nv < 0 ||
      nf < 0) {
    parse_error(path, reader.number(), "bad element counts");
  }
  for (long long i = 0; i < nv; ++i) {
    if (!next_tokens(reader, line, tok)) parse_error(path, reader.number(), "unexpected end of file");
    Vec3 p;
    if (tok.size() < 3) parse_error(path, reader.number(), "vertex needs 3 coordinates");
    for (int k = 0; k < 3; ++k) {
      if (!parse_double(tok[k], p[k])) parse_error(path, reader.number(), "bad coordinate");
    }
    mesh.vertices.push_back(p);
  }
  std::vector<int> poly;
  bool any_color = false;
  std::vector<Rgb> colors;
  for (long long i = 0; i < nf; ++i) {
    if (!next_tokens(reader, line, tok)) parse_error(path, reader.number(), "unexpected end of file");
    long long n = 0;
    if (!parse_int(tok[0], n) || n < 3 || static_cast<long long>(tok.size()) < n + 1) {
      parse_error(path, reader.number(), "bad face record");
    }
    poly.clear();
    for (long long k = 0; k < n; ++k) {
      long long idx = 0;
      if (!parse_int(tok[k + 1], idx)) parse_error(path, reader.number(), "bad face index");
      poly.push_back(static_cast<int>(idx));
    }
    Rgb rgb{0, 0, 0};
    if (static_cast<long long>(tok.size()) >= n + 4) {
      double c[3];
      bool integral = true;
      for (int k = 0; k < 3; ++k) {
        if (!parse_double(tok[n + 1 + k], c[k])) parse_error(path, reader.number(), "bad color");
        integral = integral && tok[n + 1 + k].find('.') == std::string_view::npos;
      }
      for (int k = 0; k < 3; ++k) rgb[k] = to_channel(c[k], !integral);
      any_color = true;
    }
    const std::size_t before = mesh.faces.size();
    add_polygon(mesh, poly, options.triangulate, reader);
    colors.insert(colors.end(), mesh.faces.size() - before, rgb);
  }
  if (any_color) mesh.face_colors = std::move(colors);
  check_indices(mesh);
  return mesh;
}

struct PlyProperty {
  std::string name;
  bool is_list = false;
};

struct PlyElement {
  std::string name;
  long long count = 0;
  std::vector<PlyProperty> properties;
};

RawMesh load_ply(const std::filesystem::path& path, LoadOptions options) {
  LineReader reader(path);
  std::string line;
  if (!reader.next(line) || split(line).empty() || split(line)[0] != "ply") {
    parse_error(path, reader.number(), "missing ply magic");
  }
  std::vector<PlyElement> elements;
  bool header_done = false;
  while (reader.next(line)) {
    const auto tok = split(line);
    if (tok.empty()) continue;
    if (tok[0] == "format") {
      if (tok.size() < 2 || tok[1] != "ascii") {
        throw Error(ErrorCode::kUnsupportedElement,
                    path.string() + ": only ASCII PLY is supported");
      }
    } else if (tok[0] == "element") {
      PlyElement el;
      if (tok.size() < 3 || !parse_int(tok[2], el.count) || el.count < 0) {
        parse_error(path, reader.number(), "bad element declaration");
      }
      el.name = std::string(tok[1]);
      elements.push_back(std::move(el));
    } else if (tok[0] == "property") {
      if (elements.empty() || tok.size() < 3) parse_error(path, reader.number(), "stray property");
      PlyProperty prop;
      prop.is_list = tok[1] == "list";
      if (prop.is_list && tok.size() < 5) parse_error(path, reader.number(), "bad list property");
      prop.name = std::string(tok.back());
      elements.back().properties.push_back(std::move(prop));
    } else if (tok[0] == "end_header") {
      header_done = true;
      break;
    }
  }
  if (!header_done) parse_error(path, reader.number(), "missing end_header");

  RawMesh mesh;
  std::vector<Rgb> colors;
  bool face_has_color = false;
  std::vector<int> poly;
  for (const PlyElement& el : elements) {
    for (long long i = 0; i < el.count; ++i) {
      std::vector<std::string_view> tok;
      if (!reader.next(line)) parse_error(path, reader.number(), "unexpected end of file");
      tok = split(line);
      std::size_t cursor = 0;
      auto take = [&]() -> std::string_view {
        if (cursor >= tok.size()) parse_error(path, reader.number(), "too few values");
        return tok[cursor++];
      };
      Vec3 p = Vec3::Zero();
      Rgb rgb{0, 0, 0};
      poly.clear();
      for (const PlyProperty& prop : el.properties) {
        if (prop.is_list) {
          long long n = 0;
          if (!parse_int(take(), n) || n < 0) parse_error(path, reader.number(), "bad list length");
          for (long long k = 0; k < n; ++k) {
            long long idx = 0;
            if (!parse_int(take(), idx)) parse_error(path, reader.number(), "bad list value");
            if (prop.name == "vertex_indices" || prop.name == "vertex_index") {
              poly.push_back(static_cast<int>(idx));
            }
          }
          continue;
        }
        double value = 0.0;
        if (!parse_double(take(), value)) parse_error(path, reader.number(), "bad scalar value");
        if (el.name == "vertex") {
          if (prop.name == "x") p[0] = value;
          if (prop.name == "y") p[1] = value;
          if (prop.name == "z") p[2] = value;
        } else if (el.name == "face") {
          if (prop.name == "red") rgb[0] = to_channel(value, false);
          if (prop.name == "green") rgb[1] = to_channel(value, false);
          if (prop.name == "blue") rgb[2] = to_channel(value, false);
        }
      }
      if (el.name == "vertex") {
        mesh.vertices.push_back(p);
      } else if (el.name == "face") {
        const std::size_t before = mesh.faces.size();
        add_polygon(mesh, poly, options.triangulate, reader);
        colors.insert(colors.end(), mesh.faces.size() - before, rgb);
      }
    }
    if (el.name == "face") {
      for (const auto& prop : el.properties) {
        face_has_color = face_has_color || prop.name == "red";
      }
    }
  }
  if (face_has_color) mesh.face_colors = std::move(colors);
  check_indices(mesh);
  return mesh;
}

std::string format_number(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
  return buf;
}

}  // namespace

MeshFormat format_from_path(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".obj") return MeshFormat::kObj;
  if (ext == ".off") return MeshFormat::kOff;
  if (ext == ".ply") return MeshFormat::kPly;
  throw Error(ErrorCode::kUnsupportedElement, "unknown mesh extension '" + ext + "'");
}

RawMesh load_mesh(const std::filesystem::path& path, MeshFormat format, LoadOptions options) {
  switch (format) {
    case MeshFormat::kObj: return load_obj(path, options);
    case MeshFormat::kOff: return load_off(path, options);
    case MeshFormat::kPly: return load_ply(path, options);
  }
  throw Error(ErrorCode::kUnsupportedElement, "unknown format");
}

RawMesh load_mesh(const std::filesystem::path& path, LoadOptions options) {
  return load_mesh(path, format_from_path(path), options);
}

void write_mesh(const RawMesh& mesh, const std::filesystem::path& path, MeshFormat format,
                WriteOptions options) {
  if (mesh.vertices.empty() || mesh.faces.empty()) {
    throw Error(ErrorCode::kEmptyMesh, "refusing to write an empty mesh to " + path.string());
  }
  const bool colored = !mesh.face_colors.empty();
  if (colored && mesh.face_colors.size() != mesh.faces.size()) {
    throw Error(ErrorCode::kLengthMismatch, "face color count does not match face count");
  }
  const int precision = std::max(options.precision, 6);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path.string() + " for writing");

  auto write_vertex = [&](const Vec3& p) {
    out << format_number(p[0], precision) << ' ' << format_number(p[1], precision) << ' '
        << format_number(p[2], precision);
  };

  switch (format) {
    case MeshFormat::kObj:
      for (const Vec3& p : mesh.vertices) {
        out << "v ";
        write_vertex(p);
        out << '\n';
      }
      for (const auto& f : mesh.faces) {
        out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
      }
      break;
    case MeshFormat::kOff:
      out << "OFF\n" << mesh.vertices.size() << ' ' << mesh.faces.size() << " 0\n";
      for (const Vec3& p : mesh.vertices) {
        write_vertex(p);
        out << '\n';
      }
      for (std::size_t i = 0; i < mesh.faces.size(); ++i) {
        const auto& f = mesh.faces[i];
        out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2];
        if (colored) {
          const Rgb& c = mesh.face_colors[i];
          out << ' ' << int(c[0]) << ' ' << int(c[1]) << ' ' << int(c[2]);
        }
        out << '\n';
      }
      break;
    case MeshFormat::kPly:
      out << "ply\nformat ascii 1.0\n"
          << "element vertex " << mesh.vertices.size() << '\n'
          << "property double x\nproperty double y\nproperty double z\n"
          << "element face " << mesh.faces.size() << '\n'
          << "property list uchar int vertex_indices\n";
      if (colored) out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
      out << "end_header\n";
      for (const Vec3& p : mesh.vertices) {
        write_vertex(p);
        out << '\n';
      }
      for (std::size_t i = 0; i < mesh.faces.size(); ++i) {
        const auto& f = mesh.faces[i];
        out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2];
        if (colored) {
          const Rgb& c = mesh.face_colors[i];
          out << ' ' << int(c[0]) << ' ' << int(c[1]) << ' ' << int(c[2]);
        }
        out << '\n';
      }
      break;
  }
  out.flush();
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

void write_mesh(const RawMesh& mesh, const std::filesystem::path& path, WriteOptions options) {
  write_mesh(mesh, path, format_from_path(path), options);
}

RawMesh to_raw(const Mesh& mesh) {
  RawMesh raw;
  raw.vertices = mesh.vertices();
  raw.faces = mesh.faces();
  return raw;
}

Mesh to_mesh(const RawMesh& raw) { return Mesh::build(raw.vertices, raw.faces); }

Rgb error_ramp(double angle_degrees, double clamp_max) {
  const double t = clamp_max > 0.0 ? std::clamp(angle_degrees / clamp_max, 0.0, 1.0) : 1.0;
  const auto channel = [](double x) { return static_cast<std::uint8_t>(std::lround(255.0 * x)); };
  return {channel(t), 0, channel(1.0 - t)};
}

void write_error_map(const Mesh& mesh, std::span<const double> angles_degrees,
                     const std::filesystem::path& path, double clamp_max, WriteOptions options) {
  if (angles_degrees.size() != static_cast<std::size_t>(mesh.num_faces())) {
    throw Error(ErrorCode::kLengthMismatch, "expected one angle per face");
  }
  RawMesh raw = to_raw(mesh);
  raw.face_colors.reserve(angles_degrees.size());
  for (double a : angles_degrees) raw.face_colors.push_back(error_ramp(a, clamp_max));
  write_mesh(raw, path, MeshFormat::kPly, options);
}

}  // namespace semisparse
