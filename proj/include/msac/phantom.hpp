#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "msac/filters.hpp"
#include "msac/grid.hpp"

namespace msac {

/// Arc of the region boundary whose intensity step is removed: instead of a
/// sharp edge, the intensity ramps gradually down to the background level.
struct GapArc {
  double start_deg = 0.0;
  double extent_deg = 0.0;
};

/// Bright blob outside the region, mimicking nearby tissue with
/// interior-like intensity.
struct Distractor {
  double cx = 0.0, cy = 0.0;
  double radius = 0.0;
  double level = 0.75;
};

/// Synthetic ultrasound-like test image: a two-level region with optional
/// weak/missing boundary arcs, a multiplicative low-order bias field,
/// bright distractor blobs and multiplicative speckle. The ground-truth
/// mask is the exact rasterized shape, independent of all corruption
/// settings.
struct PhantomSpec {
  int width = 256, height = 256;
  // region shape: rotated ellipse, or a polygon when vertices are given
  double cx = 128.0, cy = 128.0;
  double a = 60.0, b = 45.0;
  double rot_deg = 0.0;
  std::vector<std::array<double, 2>> polygon;

  double fg = 0.75;  // interior level
  double bg = 0.35;  // background level
  double blur_sigma = 2.0;
  double gap_ramp = 14.0;  // length of the feathered transition in a gap

  std::vector<GapArc> gaps;
  std::vector<Distractor> distractors;
  std::array<double, 5> bias{0, 0, 0, 0, 0};  // x, y, x^2, y^2, xy over [-1,1]^2
  double speckle_sigma = 0.0;
  std::uint64_t rng_seed = 1;
};

namespace detail {

// Deterministic standard normals: Box-Muller over mt19937_64 uniforms.
class GaussianRng {
 public:
  explicit GaussianRng(std::uint64_t seed) : eng_(seed) {}
  double next() {
    if (have_) {
      have_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    have_ = true;
    return r * std::cos(t);
  }

 private:
  double uniform() { return (eng_() >> 11) * 0x1.0p-53; }
  std::mt19937_64 eng_;
  bool have_ = false;
  double spare_ = 0.0;
};

inline bool point_in_polygon(const std::vector<std::array<double, 2>>& poly, double x, double y) {
  bool in = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const double yi = poly[i][1], yj = poly[j][1];
    const double xi = poly[i][0], xj = poly[j][0];
    if ((yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi) in = !in;
  }
  return in;
}

// Boundary radius along direction theta from the shape center. Polygons are
// ray-cast from the centroid (assumed star-shaped for gap rendering).
inline double boundary_radius(const PhantomSpec& s, double theta) {
  if (s.polygon.size() >= 3) {
    const double dx = std::cos(theta), dy = std::sin(theta);
    double best = 0.0;
    const std::size_t n = s.polygon.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      const double ax = s.polygon[j][0] - s.cx, ay = s.polygon[j][1] - s.cy;
      const double bx = s.polygon[i][0] - s.cx, by = s.polygon[i][1] - s.cy;
      const double ex = bx - ax, ey = by - ay;
      const double denom = dx * ey - dy * ex;
      if (std::abs(denom) < 1e-12) continue;
      const double t = (ax * ey - ay * ex) / denom;   // along the ray
      const double u = (ax * dy - ay * dx) / -denom;  // along the edge
      if (t > 0.0 && u >= 0.0 && u <= 1.0) best = std::max(best, t);
    }
    return best;
  }
  const double rot = s.rot_deg * std::numbers::pi / 180.0;
  const double c = std::cos(theta - rot), sn = std::sin(theta - rot);
  return 1.0 / std::sqrt(c * c / (s.a * s.a) + sn * sn / (s.b * s.b));
}

inline bool angle_in_arc(double theta_deg, const GapArc& arc) {
  double d = std::fmod(theta_deg - arc.start_deg, 360.0);
  if (d < 0) d += 360.0;
  return d <= arc.extent_deg;
}

}  // namespace detail

inline BinaryMask rasterize_phantom_shape(const PhantomSpec& s) {
  BinaryMask m(s.width, s.height);
  if (s.polygon.size() >= 3) {
    for (int y = 0; y < s.height; ++y)
      for (int x = 0; x < s.width; ++x)
        if (detail::point_in_polygon(s.polygon, x, y)) m.set(x, y, true);
    return m;
  }
  const double rot = s.rot_deg * std::numbers::pi / 180.0;
  const double cr = std::cos(rot), sr = std::sin(rot);
  for (int y = 0; y < s.height; ++y)
    for (int x = 0; x < s.width; ++x) {
      const double dx = x - s.cx, dy = y - s.cy;
      const double ex = dx * cr + dy * sr, ey = -dx * sr + dy * cr;
      if ((ex * ex) / (s.a * s.a) + (ey * ey) / (s.b * s.b) <= 1.0) m.set(x, y, true);
    }
  return m;
}

/// Generate the phantom image and its exact ground-truth mask.
inline std::pair<ScalarGrid, BinaryMask> generate(const PhantomSpec& spec) {
  if (spec.width < 8 || spec.height < 8)
    throw std::invalid_argument("phantom: dims must be at least 8x8");
  if (spec.a <= 0.0 || spec.b <= 0.0)
    throw std::invalid_argument("phantom: semi-axes must be positive");
  if (spec.polygon.empty()) {
    const double reach = std::max(spec.a, spec.b);
    if (spec.cx - reach < 0 || spec.cx + reach > spec.width - 1 || spec.cy - reach < 0 ||
        spec.cy + reach > spec.height - 1)
      throw std::invalid_argument("phantom: shape outside image dims");
  } else {
    if (spec.polygon.size() < 3) throw std::invalid_argument("phantom: polygon needs >= 3 vertices");
    for (const auto& p : spec.polygon)
      if (p[0] < 0 || p[0] > spec.width - 1 || p[1] < 0 || p[1] > spec.height - 1)
        throw std::invalid_argument("phantom: polygon vertex outside image dims");
  }

  const BinaryMask mask = rasterize_phantom_shape(spec);

  // Structure image before blur: two-level region, gap feathering, blobs.
  ScalarGrid img(spec.width, spec.height, spec.bg);
  for (int y = 0; y < spec.height; ++y)
    for (int x = 0; x < spec.width; ++x)
      if (mask.at(x, y)) img.at(x, y) = spec.fg;

  for (const auto& arc : spec.gaps) {
    for (int y = 0; y < spec.height; ++y)
      for (int x = 0; x < spec.width; ++x) {
        const double dx = x - spec.cx, dy = y - spec.cy;
        const double theta = std::atan2(dy, dx);
        if (!detail::angle_in_arc(theta * 180.0 / std::numbers::pi, arc)) continue;
        const double r = std::hypot(dx, dy);
        const double re = detail::boundary_radius(spec, theta);
        if (r <= re) continue;  // interior keeps its level
        const double t = (r - re) / std::max(spec.gap_ramp, 1e-9);
        if (t >= 1.0) continue;
        const double sm = t * t * (3.0 - 2.0 * t);  // smoothstep down to bg
        img.at(x, y) = spec.fg + (spec.bg - spec.fg) * sm;
      }
  }

  for (const auto& d : spec.distractors) {
    for (int y = 0; y < spec.height; ++y)
      for (int x = 0; x < spec.width; ++x)
        if (std::hypot(x - d.cx, y - d.cy) <= d.radius) img.at(x, y) = d.level;
  }

  img = gaussian_blur(img, spec.blur_sigma);

  const bool has_bias = std::any_of(spec.bias.begin(), spec.bias.end(),
                                    [](double c) { return c != 0.0; });
  if (has_bias) {
    for (int y = 0; y < spec.height; ++y) {
      const double v = spec.height > 1 ? 2.0 * y / (spec.height - 1) - 1.0 : 0.0;
      for (int x = 0; x < spec.width; ++x) {
        const double u = spec.width > 1 ? 2.0 * x / (spec.width - 1) - 1.0 : 0.0;
        const double bias = spec.bias[0] * u + spec.bias[1] * v + spec.bias[2] * u * u +
                            spec.bias[3] * v * v + spec.bias[4] * u * v;
        img.at(x, y) *= 1.0 + bias;
      }
    }
  }

  if (spec.speckle_sigma > 0.0) {
    detail::GaussianRng rng(spec.rng_seed);
    for (auto& p : img.data) p *= 1.0 + spec.speckle_sigma * rng.next();
  }

  for (auto& p : img.data) p = std::clamp(p, 0.0, 1.0);
  return {std::move(img), mask};
}

}  // namespace msac
