// Independent naive implementations used as test oracles. Everything here
// is deliberately written as plain double loops over pixels, sharing no
// code path with the library implementations it checks.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "msac/energies.hpp"
#include "msac/grid.hpp"
#include "msac/level_set.hpp"

namespace oracle {

// Brute-force min-over-all-pairs squared distance to the set pixels.
inline std::vector<std::int64_t> brute_squared_distance(const msac::BinaryMask& set) {
  std::vector<std::int64_t> out(set.bits.size(), std::numeric_limits<std::int64_t>::max());
  for (int y = 0; y < set.height; ++y)
    for (int x = 0; x < set.width; ++x) {
      std::int64_t best = std::numeric_limits<std::int64_t>::max();
      for (int sy = 0; sy < set.height; ++sy)
        for (int sx = 0; sx < set.width; ++sx) {
          if (!set.at(sx, sy)) continue;
          const std::int64_t dx = x - sx, dy = y - sy;
          best = std::min(best, dx * dx + dy * dy);
        }
      out[std::size_t(y) * set.width + x] = best;
    }
  return out;
}

// Signed distance with the same half-pixel boundary convention as the
// library, but via the all-pairs scan.
inline msac::ScalarGrid brute_signed_distance(const msac::BinaryMask& mask) {
  const auto d_in = brute_squared_distance(mask);
  const auto d_out = brute_squared_distance(msac::complement(mask));
  msac::ScalarGrid phi(mask.width, mask.height);
  for (std::size_t i = 0; i < phi.data.size(); ++i)
    phi.data[i] = mask.bits[i] ? std::sqrt(double(d_out[i])) - 0.5
                               : -(std::sqrt(double(d_in[i])) - 0.5);
  return phi;
}

inline double heaviside(double z, double eps) {
  return 0.5 + std::atan2(z, eps) / std::acos(-1.0);
}

// Patch means with the same fallback rule, recomputed pixel by pixel.
inline void naive_patch_means(const msac::ScalarGrid& img, const msac::ScalarGrid& phi,
                              int x, int y, int r, double& u, double& v) {
  double s_in = 0, s_out = 0, s_all = 0;
  int n_in = 0, n_out = 0;
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx) {
      const int px = x + dx, py = y + dy;
      if (px < 0 || py < 0 || px >= img.width || py >= img.height) continue;
      const double I = img.at(px, py);
      s_all += I;
      if (phi.at(px, py) > 0.0) { s_in += I; ++n_in; }
      else { s_out += I; ++n_out; }
    }
  const double mean_all = s_all / double(n_in + n_out);
  u = n_in > 0 ? s_in / n_in : mean_all;
  v = n_out > 0 ? s_out / n_out : mean_all;
}

// Eq-style local region energy: double loop over band pixels and their
// patches.
inline double naive_energy_local(const msac::ScalarGrid& img, const msac::ScalarGrid& phi,
                                 const msac::ModelParams& p) {
  double total = 0.0;
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      if (!(std::abs(phi.at(x, y)) < p.band_halfwidth)) continue;
      double u, v;
      naive_patch_means(img, phi, x, y, p.patch_radius, u, v);
      for (int dy = -p.patch_radius; dy <= p.patch_radius; ++dy)
        for (int dx = -p.patch_radius; dx <= p.patch_radius; ++dx) {
          const int px = x + dx, py = y + dy;
          if (px < 0 || py < 0 || px >= img.width || py >= img.height) continue;
          const double I = img.at(px, py);
          const double H = heaviside(phi.at(px, py), p.heaviside_eps);
          total += (I - u) * (I - u) * H + (I - v) * (I - v) * (1.0 - H);
        }
    }
  return total;
}

inline double naive_energy_shape(const msac::ScalarGrid& phi, const msac::ScalarGrid& bs,
                                 double eps) {
  double total = 0.0;
  for (std::size_t i = 0; i < phi.data.size(); ++i)
    total += heaviside(phi.data[i], eps) * bs.data[i];
  return total;
}

inline double naive_energy_regularizer(const msac::ScalarGrid& phi, double eps) {
  double total = 0.0;
  for (int y = 1; y < phi.height - 1; ++y)
    for (int x = 1; x < phi.width - 1; ++x) {
      const double gx = (heaviside(phi.at(x + 1, y), eps) - heaviside(phi.at(x - 1, y), eps)) / 2.0;
      const double gy = (heaviside(phi.at(x, y + 1), eps) - heaviside(phi.at(x, y - 1), eps)) / 2.0;
      total += std::hypot(gx, gy);
    }
  return total;
}

// Per-pixel TP/FP/Js triple counter.
inline void brute_counts(const msac::BinaryMask& a, const msac::BinaryMask& m, long& inter,
                         long& only_a, long& uni, long& m_size) {
  inter = only_a = uni = m_size = 0;
  for (std::size_t i = 0; i < a.bits.size(); ++i) {
    const bool in_a = a.bits[i] != 0, in_m = m.bits[i] != 0;
    if (in_m) ++m_size;
    if (in_a && in_m) ++inter;
    if (in_a && !in_m) ++only_a;
    if (in_a || in_m) ++uni;
  }
}

// Random geometry helpers for property tests.
inline msac::BinaryMask random_mask(std::mt19937& rng, int w, int h, double p_true = 0.5) {
  msac::BinaryMask m(w, h);
  std::bernoulli_distribution bit(p_true);
  for (auto& b : m.bits) b = bit(rng) ? 1 : 0;
  return m;
}

// Random blob mask with a non-degenerate interior and exterior: a few
// random disks on an empty field.
inline msac::BinaryMask random_blob(std::mt19937& rng, int w, int h) {
  msac::BinaryMask m(w, h);
  std::uniform_real_distribution<double> ux(2.0, w - 3.0), uy(2.0, h - 3.0);
  std::uniform_real_distribution<double> ur(2.0, std::min(w, h) / 3.0);
  const int disks = 1 + int(rng() % 3);
  for (int d = 0; d < disks; ++d) {
    const double cx = ux(rng), cy = uy(rng), r = ur(rng);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        if (std::hypot(x - cx, y - cy) <= r) m.set(x, y, true);
  }
  if (m.count() == 0) m.set(w / 2, h / 2, true);
  if (m.count() == int(m.bits.size())) m.set(0, 0, false);
  return m;
}

inline msac::ScalarGrid disk_sdf(int w, int h, double cx, double cy, double r) {
  msac::ScalarGrid phi(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) phi.at(x, y) = r - std::hypot(x - cx, y - cy);
  return phi;
}

inline msac::ScalarGrid smooth_noise_image(std::mt19937& rng, int w, int h) {
  msac::ScalarGrid img(w, h);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto& v : img.data) v = u(rng);
  // light 3x3 smoothing so patches carry structure
  msac::ScalarGrid out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0;
      int n = 0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const int px = x + dx, py = y + dy;
          if (px < 0 || py < 0 || px >= w || py >= h) continue;
          acc += img.at(px, py);
          ++n;
        }
      out.at(x, y) = acc / n;
    }
  return out;
}

}  // namespace oracle
