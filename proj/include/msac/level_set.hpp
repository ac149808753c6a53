#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "msac/distance_transform.hpp"
#include "msac/grid.hpp"

namespace msac {

/// Level-set embedding of a contour. The zero isocontour is the boundary;
/// phi > 0 inside, phi < 0 outside. Kept near a signed distance function by
/// periodic reinitialization.
struct LevelSetField {
  ScalarGrid grid;

  LevelSetField() = default;
  explicit LevelSetField(ScalarGrid g) : grid(std::move(g)) {}
  int width() const { return grid.width; }
  int height() const { return grid.height; }
};

/// Smoothed step H_eps(z) = 1/2 (1 + 2/pi atan(z/eps)). Strictly increasing,
/// nonzero derivative everywhere, H(-z) = 1 - H(z).
inline double heaviside_smoothed(double z, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("heaviside_smoothed: eps must be > 0");
  if (!std::isfinite(z)) throw std::domain_error("heaviside_smoothed: non-finite input");
  return 0.5 * (1.0 + (2.0 / std::numbers::pi) * std::atan(z / eps));
}

/// Derivative of heaviside_smoothed: eps / (pi (eps^2 + z^2)).
inline double dirac_smoothed(double z, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("dirac_smoothed: eps must be > 0");
  if (!std::isfinite(z)) throw std::domain_error("dirac_smoothed: non-finite input");
  return eps / (std::numbers::pi * (eps * eps + z * z));
}

inline ScalarGrid heaviside_field(const ScalarGrid& phi, double eps) {
  ScalarGrid out(phi.width, phi.height);
  for (std::size_t i = 0; i < phi.data.size(); ++i)
    out.data[i] = heaviside_smoothed(phi.data[i], eps);
  return out;
}

inline ScalarGrid dirac_field(const ScalarGrid& phi, double eps) {
  ScalarGrid out(phi.width, phi.height);
  for (std::size_t i = 0; i < phi.data.size(); ++i)
    out.data[i] = dirac_smoothed(phi.data[i], eps);
  return out;
}

/// Mean curvature div(grad phi / |grad phi|) at an interior pixel via the
/// 3x3 central-difference formula. Gradient magnitude floored at 1e-8.
inline double curvature(const LevelSetField& phi, int x, int y) {
  const ScalarGrid& g = phi.grid;
  if (x < 1 || y < 1 || x > g.width - 2 || y > g.height - 2)
    throw std::invalid_argument("curvature: border pixel");
  const double px = (g.at(x + 1, y) - g.at(x - 1, y)) * 0.5;
  const double py = (g.at(x, y + 1) - g.at(x, y - 1)) * 0.5;
  const double pxx = g.at(x + 1, y) - 2.0 * g.at(x, y) + g.at(x - 1, y);
  const double pyy = g.at(x, y + 1) - 2.0 * g.at(x, y) + g.at(x, y - 1);
  const double pxy = (g.at(x + 1, y + 1) - g.at(x - 1, y + 1) -
                      g.at(x + 1, y - 1) + g.at(x - 1, y - 1)) * 0.25;
  const double mag = std::max(std::sqrt(px * px + py * py), 1e-8);
  return (pxx * py * py - 2.0 * px * py * pxy + pyy * px * px) / (mag * mag * mag);
}

/// Region indicated by the positive phase of phi.
inline BinaryMask mask_from_levelset(const LevelSetField& phi) {
  BinaryMask out(phi.width(), phi.height());
  for (std::size_t i = 0; i < phi.grid.data.size(); ++i)
    out.bits[i] = phi.grid.data[i] > 0.0 ? 1 : 0;
  return out;
}

/// Signed Euclidean distance field, positive inside. |phi| is the distance
/// to the nearest opposite-phase pixel minus 1/2, which places the zero
/// crossing on the half-pixel boundary between phases (a half-plane mask
/// yields the ramp ..., -1.5, -0.5, +0.5, +1.5, ...). Requires at least one
/// inside and one outside pixel.
inline LevelSetField levelset_from_mask(const BinaryMask& mask) {
  const int n = mask.count();
  if (n == 0 || std::size_t(n) == mask.bits.size())
    throw std::invalid_argument("levelset_from_mask: mask has no interior or no exterior");
  const auto d2_to_in = squared_distance_to_set(mask);
  const auto d2_to_out = squared_distance_to_set(complement(mask));
  ScalarGrid phi(mask.width, mask.height);
  for (std::size_t i = 0; i < phi.data.size(); ++i) {
    phi.data[i] = mask.bits[i] ? std::sqrt(double(d2_to_out[i])) - 0.5
                               : -(std::sqrt(double(d2_to_in[i])) - 0.5);
  }
  return LevelSetField(std::move(phi));
}

/// Rebuild the signed distance property while keeping the current sign
/// pattern. Throws (via levelset_from_mask) when the interior or exterior
/// has vanished.
inline LevelSetField reinitialize(const LevelSetField& phi) {
  return levelset_from_mask(mask_from_levelset(phi));
}

}  // namespace msac
