#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "camplace/error.hpp"
#include "camplace/rng.hpp"

namespace camplace {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr bool operator==(const Vec3&) const = default;

  constexpr double operator[](int axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }
};

constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

inline Vec3 normalized(const Vec3& v) { return v / norm(v); }

inline bool is_finite(const Vec3& v) {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

inline double angle_between(const Vec3& a, const Vec3& b) {
  return std::atan2(norm(cross(a, b)), dot(a, b));
}

inline constexpr Vec3 kWorldUp{0.0, 1.0, 0.0};
inline constexpr Vec3 kZAxis{0.0, 0.0, 1.0};

inline constexpr double kDeterminantEpsilon = 1e-12;
inline constexpr double kMinHitDistance = 1e-9;
inline constexpr double kUnitTolerance = 1e-9;

struct Triangle {
  Vec3 a;
  Vec3 b;
  Vec3 c;

  double area() const { return 0.5 * norm(cross(b - a, c - a)); }
};

struct Aabb {
  Vec3 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity()};
  Vec3 hi{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
          -std::numeric_limits<double>::infinity()};

  void extend(const Vec3& p) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
  }
  void extend(const Triangle& t) {
    extend(t.a);
    extend(t.b);
    extend(t.c);
  }
  bool empty() const { return lo.x > hi.x; }
  Vec3 extent() const { return hi - lo; }
};

// Möller–Trumbore. Edges are inclusive; hits closer than kMinHitDistance are
// ignored so a ray leaving a surface point does not hit that surface.
inline std::optional<double> ray_triangle_intersect(const Vec3& origin, const Vec3& dir,
                                                    const Triangle& tri) {
  constexpr double kBaryTolerance = 1e-12;
  const Vec3 e1 = tri.b - tri.a;
  const Vec3 e2 = tri.c - tri.a;
  const Vec3 p = cross(dir, e2);
  const double det = dot(e1, p);
  if (std::abs(det) < kDeterminantEpsilon) return std::nullopt;
  const double inv_det = 1.0 / det;
  const Vec3 s = origin - tri.a;
  const double u = dot(s, p) * inv_det;
  if (u < -kBaryTolerance || u > 1.0 + kBaryTolerance) return std::nullopt;
  const Vec3 q = cross(s, e1);
  const double v = dot(dir, q) * inv_det;
  if (v < -kBaryTolerance || u + v > 1.0 + kBaryTolerance) return std::nullopt;
  const double t = dot(e2, q) * inv_det;
  if (t < kMinHitDistance) return std::nullopt;
  return t;
}

struct RayHit {
  double t = 0.0;
  Vec3 point;
};

// Closest hit over a triangle soup.
inline std::optional<RayHit> ray_first_hit(const Vec3& origin, const Vec3& dir,
                                           std::span<const Triangle> triangles) {
  std::optional<double> best;
  for (const auto& tri : triangles) {
    if (auto t = ray_triangle_intersect(origin, dir, tri); t && (!best || *t < *best)) best = t;
  }
  if (!best) return std::nullopt;
  return RayHit{*best, origin + dir * *best};
}

// Minimal rotation taking `from` to `to`, applied to `v` (Rodrigues form of
// the axis-angle matrix). Nearly coincident inputs leave `v` unchanged;
// antiparallel inputs have no unique axis and are rejected.
inline Vec3 rotate_along(const Vec3& from_raw, const Vec3& to_raw, const Vec3& v) {
  const Vec3 from = normalized(from_raw);
  const Vec3 to = normalized(to_raw);
  const double c = std::clamp(dot(from, to), -1.0, 1.0);
  if (c > 1.0 - 1e-9) return v;
  if (c < -1.0 + 1e-9) {
    throw Error(ErrorCode::kAntiparallelRotation, "rotation axis undefined for opposite vectors");
  }
  const Vec3 n = normalized(cross(from, to));
  const double s = std::sqrt(1.0 - c * c);
  const double t = 1.0 - c;
  const double nx = n.x, ny = n.y, nz = n.z;
  return {
      (t * nx * nx + c) * v.x + (t * nx * ny - s * nz) * v.y + (t * nx * nz + s * ny) * v.z,
      (t * nx * ny + s * nz) * v.x + (t * ny * ny + c) * v.y + (t * ny * nz - s * nx) * v.z,
      (t * nx * nz - s * ny) * v.x + (t * ny * nz + s * nx) * v.y + (t * nz * nz + c) * v.z,
  };
}

// Rotation of `v` about unit `axis` by `angle` (right-handed).
inline Vec3 rotate_about(const Vec3& v, const Vec3& axis, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return v * c + cross(axis, v) * s + axis * (dot(axis, v) * (1.0 - c));
}

// Directions uniform on the cap of half-angle alpha around +z.
inline std::vector<Vec3> sample_spherical_cap(double alpha, std::size_t n, Rng& rng) {
  const double z_min = std::cos(alpha);
  std::vector<Vec3> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = rng.uniform(0.0, 1.0 - z_min) + z_min;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
    out.push_back({r * std::cos(theta), r * std::sin(theta), z});
  }
  return out;
}

inline bool is_vertical(const Vec3& dir) {
  return norm(dir - kWorldUp) <= kUnitTolerance || norm(dir + kWorldUp) <= kUnitTolerance;
}

/// Camera frame for zero roll with +y as world up.
struct CameraFrame {
  Vec3 forward;
  Vec3 right;
  Vec3 up;
};

inline CameraFrame camera_frame(const Vec3& dir) {
  const Vec3 side = cross(dir, kWorldUp);
  if (norm(side) < 1e-9) {
    throw Error(ErrorCode::kDegenerateOrientation, "view direction parallel to world up");
  }
  CameraFrame f;
  f.forward = dir;
  f.right = normalized(side);
  f.up = cross(f.right, dir);
  return f;
}

struct FrustumCorners {
  Vec3 w1;
  Vec3 w2;
  Vec3 h1;
  Vec3 h2;
};

// FOV extremity points at unit distance from the apex.
inline FrustumCorners frustum_corners(const Vec3& position, const Vec3& dir, double hfov,
                                      double vfov) {
  if (!(hfov > 0.0 && hfov < std::numbers::pi && vfov > 0.0 && vfov < std::numbers::pi)) {
    throw Error(ErrorCode::kInvalidParams, "field of view must lie in (0, pi)");
  }
  const CameraFrame f = camera_frame(dir);
  return {
      position + rotate_about(dir, f.up, 0.5 * hfov),
      position + rotate_about(dir, f.up, -0.5 * hfov),
      position + rotate_about(dir, f.right, 0.5 * vfov),
      position + rotate_about(dir, f.right, -0.5 * vfov),
  };
}

namespace detail {

// Projection interval of the triangle on `axis` vs the box half-extents.
// Touching intervals count as separated.
inline bool separated_on_axis(const Vec3& axis, const Vec3& v0, const Vec3& v1, const Vec3& v2,
                              const Vec3& half) {
  const double p0 = dot(v0, axis), p1 = dot(v1, axis), p2 = dot(v2, axis);
  const double r = half.x * std::abs(axis.x) + half.y * std::abs(axis.y) + half.z * std::abs(axis.z);
  const double lo = std::min({p0, p1, p2});
  const double hi = std::max({p0, p1, p2});
  constexpr double kTouch = 1e-9;
  return lo >= r - kTouch || hi <= -r + kTouch;
}

}  // namespace detail

// Separating-axis test for a triangle against an open box: a triangle that
// only touches the box boundary (for example a wall lying on a voxel face)
// does not overlap it.
inline bool triangle_overlaps_box(const Triangle& tri, const Vec3& center, const Vec3& half) {
  const Vec3 v0 = tri.a - center, v1 = tri.b - center, v2 = tri.c - center;
  const std::array<Vec3, 3> edges{v1 - v0, v2 - v1, v0 - v2};
  const std::array<Vec3, 3> axes{Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}};
  for (const auto& a : axes) {
    if (detail::separated_on_axis(a, v0, v1, v2, half)) return false;
  }
  const Vec3 normal = cross(edges[0], edges[1]);
  if (norm(normal) > 0.0 && detail::separated_on_axis(normalized(normal), v0, v1, v2, half)) {
    return false;
  }
  for (const auto& e : edges) {
    for (const auto& a : axes) {
      const Vec3 axis = cross(a, e);
      const double len = norm(axis);
      if (len < 1e-12) continue;
      if (detail::separated_on_axis(axis / len, v0, v1, v2, half)) return false;
    }
  }
  return true;
}

}  // namespace camplace
