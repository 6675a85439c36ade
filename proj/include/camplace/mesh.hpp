#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "camplace/error.hpp"
#include "camplace/geometry.hpp"

namespace camplace {

inline constexpr double kMinTriangleArea = 1e-12;

struct TriangleMesh {
  std::vector<Triangle> triangles;
  Aabb bounds;
  std::size_t dropped_degenerate = 0;

  bool empty() const { return triangles.empty(); }

  void add(const Triangle& t) {
    triangles.push_back(t);
    bounds.extend(t);
  }
};

// Drops degenerate faces and recomputes bounds. Throws on non-finite input.
inline TriangleMesh validated(std::vector<Triangle> raw) {
  TriangleMesh mesh;
  for (const auto& t : raw) {
    if (!is_finite(t.a) || !is_finite(t.b) || !is_finite(t.c)) {
      throw Error(ErrorCode::kParse, "non-finite vertex");
    }
    if (t.area() <= kMinTriangleArea) {
      ++mesh.dropped_degenerate;
      continue;
    }
    mesh.add(t);
  }
  return mesh;
}

namespace detail {

inline bool parse_double(std::string_view token, double& out) {
  // std::from_chars for double is available in libstdc++ 11.
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc() && ptr == end;
}

// "12", "12/3", "12/3/4", "12//4"; negative values index from the end.
inline bool parse_face_index(std::string_view token, std::size_t vertex_count, std::size_t& out) {
  const auto slash = token.find('/');
  const std::string_view head = token.substr(0, slash);
  long long value = 0;
  auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), value);
  if (ec != std::errc() || ptr != head.data() + head.size() || value == 0) return false;
  const long long resolved = value > 0 ? value - 1 : static_cast<long long>(vertex_count) + value;
  if (resolved < 0 || resolved >= static_cast<long long>(vertex_count)) return false;
  out = static_cast<std::size_t>(resolved);
  return true;
}

}  // namespace detail

/// Parses the `v`/`f` subset of Wavefront OBJ. Polygons are fan-triangulated,
/// every other record is ignored.
inline TriangleMesh parse_obj(std::istream& in) {
  std::vector<Vec3> vertices;
  std::vector<Triangle> raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      std::array<double, 3> xyz{};
      for (auto& c : xyz) {
        std::string tok;
        if (!(ss >> tok) || !detail::parse_double(tok, c)) {
          throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) + ": bad vertex");
        }
      }
      vertices.push_back({xyz[0], xyz[1], xyz[2]});
    } else if (tag == "f") {
      std::vector<std::size_t> idx;
      std::string tok;
      while (ss >> tok) {
        std::size_t i = 0;
        if (!detail::parse_face_index(tok, vertices.size(), i)) {
          throw Error(ErrorCode::kParse,
                      "line " + std::to_string(line_no) + ": bad face index '" + tok + "'");
        }
        idx.push_back(i);
      }
      if (idx.size() < 3) {
        throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) + ": face needs 3 indices");
      }
      for (std::size_t k = 1; k + 1 < idx.size(); ++k) {
        raw.push_back({vertices[idx[0]], vertices[idx[k]], vertices[idx[k + 1]]});
      }
    }
  }
  TriangleMesh mesh = validated(std::move(raw));
  if (mesh.empty()) throw Error(ErrorCode::kEmptyMesh, "no usable triangles");
  if (mesh.dropped_degenerate > 0) {
    std::fprintf(stderr, "warning: dropped %zu degenerate faces\n", mesh.dropped_degenerate);
  }
  return mesh;
}

inline TriangleMesh load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kSceneNotFound, path.string());
  return parse_obj(in);
}

// Writes a triangle soup with one vertex per corner; the output is a pure
// function of the mesh.
inline void write_obj(std::ostream& out, const TriangleMesh& mesh) {
  char buf[128];
  for (const auto& t : mesh.triangles) {
    for (const Vec3* v : {&t.a, &t.b, &t.c}) {
      std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", v->x, v->y, v->z);
      out << buf;
    }
  }
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
    out << "f " << 3 * i + 1 << ' ' << 3 * i + 2 << ' ' << 3 * i + 3 << '\n';
  }
}

}  // namespace camplace
