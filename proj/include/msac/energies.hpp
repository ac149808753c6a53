#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "msac/distance_transform.hpp"
#include "msac/grid.hpp"
#include "msac/level_set.hpp"

namespace msac {

/// Tunables of the local-region model with the cross-scale shape constraint.
struct ModelParams {
  double omega1 = 0.9;          // weight of the local region energy
  double omega2 = 0.1;          // weight of the shape similarity term
  double omega3 = 0.8;          // weight of the contour-length regularizer
  int patch_radius = 5;         // half-width of the square patch P_x
  double band_halfwidth = 6.0;  // |phi| threshold defining the narrow band
  double r_s = 3.0;             // dead-zone radius of the shape penalty
  double heaviside_eps = 1.0;   // smoothing of H and delta
  double dt = 0.1;              // explicit Euler time step
  int max_iters_per_scale = 200;
  double convergence_tol = 1e-4;  // relative energy change over a 10-iter window

  void validate() const {
    if (patch_radius < 1) throw std::invalid_argument("ModelParams: patch_radius must be >= 1");
    if (band_halfwidth < 1.0) throw std::invalid_argument("ModelParams: band_halfwidth must be >= 1");
    if (r_s < 0.0) throw std::invalid_argument("ModelParams: r_s must be >= 0");
    if (!(heaviside_eps > 0.0)) throw std::invalid_argument("ModelParams: heaviside_eps must be > 0");
    if (!(dt > 0.0)) throw std::invalid_argument("ModelParams: dt must be > 0");
    if (omega1 < 0 || omega2 < 0 || omega3 < 0)
      throw std::invalid_argument("ModelParams: weights must be >= 0");
    if (max_iters_per_scale < 0) throw std::invalid_argument("ModelParams: negative iteration budget");
    if (convergence_tol < 0) throw std::invalid_argument("ModelParams: negative tolerance");
  }
};

/// Per-pixel local statistics on the narrow band: u = mean intensity of the
/// patch pixels inside the contour, v = outside. Only valid at band pixels.
struct LocalStats {
  ScalarGrid u;
  ScalarGrid v;
  BinaryMask band;
};

/// Summed-area table with a zero guard row/column; box sums in O(1).
class IntegralImage {
 public:
  explicit IntegralImage(const ScalarGrid& g) : w_(g.width), h_(g.height), s_((w_ + 1) * std::size_t(h_ + 1), 0.0) {
    for (int y = 0; y < h_; ++y) {
      double row = 0.0;
      for (int x = 0; x < w_; ++x) {
        row += g.at(x, y);
        s_[idx(x + 1, y + 1)] = s_[idx(x + 1, y)] + row;
      }
    }
  }

  // Inclusive box [x0..x1] x [y0..y1]; caller clamps to the grid.
  double box(int x0, int y0, int x1, int y1) const {
    return s_[idx(x1 + 1, y1 + 1)] - s_[idx(x0, y1 + 1)] - s_[idx(x1 + 1, y0)] + s_[idx(x0, y0)];
  }

 private:
  std::size_t idx(int x, int y) const { return std::size_t(y) * (w_ + 1) + x; }
  int w_, h_;
  std::vector<double> s_;
};

/// Narrow band B_eps: pixels with |phi| < band_halfwidth.
inline BinaryMask band_indicator(const LevelSetField& phi, double band_halfwidth) {
  BinaryMask out(phi.width(), phi.height());
  for (std::size_t i = 0; i < phi.grid.data.size(); ++i)
    out.bits[i] = std::abs(phi.grid.data[i]) < band_halfwidth ? 1 : 0;
  return out;
}

namespace detail {

struct PatchBox {
  int x0, y0, x1, y1;
};

inline PatchBox clip_patch(int x, int y, int r, int w, int h) {
  return {std::max(0, x - r), std::max(0, y - r), std::min(w - 1, x + r), std::min(h - 1, y + r)};
}

}  // namespace detail

/// Local interior/exterior patch means at every band pixel. When one side of
/// a patch is empty the statistic falls back to the whole-patch mean, which
/// keeps the force bounded in degenerate corners.
inline LocalStats local_stats(const ScalarGrid& image, const LevelSetField& phi,
                              const ModelParams& params) {
  if (!image.same_size(phi.grid))
    throw std::invalid_argument("local_stats: image/phi dimension mismatch");
  const int w = image.width, h = image.height;

  ScalarGrid in_count(w, h), in_sum(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const bool in = phi.grid.at(x, y) > 0.0;
      in_count.at(x, y) = in ? 1.0 : 0.0;
      in_sum.at(x, y) = in ? image.at(x, y) : 0.0;
    }
  const IntegralImage ii_count(in_count), ii_in(in_sum), ii_all(image);

  LocalStats st{ScalarGrid(w, h), ScalarGrid(w, h), band_indicator(phi, params.band_halfwidth)};
  const int r = params.patch_radius;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!st.band.at(x, y)) continue;
      const auto b = detail::clip_patch(x, y, r, w, h);
      const double area = double(b.x1 - b.x0 + 1) * (b.y1 - b.y0 + 1);
      const double n_in = ii_count.box(b.x0, b.y0, b.x1, b.y1);
      const double s_in = ii_in.box(b.x0, b.y0, b.x1, b.y1);
      const double s_all = ii_all.box(b.x0, b.y0, b.x1, b.y1);
      const double n_out = area - n_in;
      st.u.at(x, y) = n_in > 0.0 ? s_in / n_in : s_all / area;
      st.v.at(x, y) = n_out > 0.0 ? (s_all - s_in) / n_out : s_all / area;
    }
  return st;
}

/// Shape penalty field B_s from the previous-scale contour: zero inside the
/// dead zone (distance < r_s), the distance itself elsewhere.
inline ScalarGrid shape_penalty_field(const BinaryMask& previous_contour, double r_s) {
  if (previous_contour.count() == 0)
    throw std::invalid_argument("shape_penalty_field: empty previous contour");
  ScalarGrid d = distance_transform(previous_contour);
  for (auto& v : d.data)
    if (v < r_s) v = 0.0;
  return d;
}

/// Local region energy: for each band pixel x, the patch-restricted fit of
/// the two-mean model, summed over the band.
inline double energy_local(const ScalarGrid& image, const LevelSetField& phi,
                           const LocalStats& stats, const ModelParams& params) {
  if (!image.same_size(phi.grid))
    throw std::invalid_argument("energy_local: image/phi dimension mismatch");
  const int w = image.width, h = image.height;
  const double eps = params.heaviside_eps;

  ScalarGrid hg = heaviside_field(phi.grid, eps);
  ScalarGrid ih(w, h), i2h(w, h), i2(w, h);
  for (std::size_t k = 0; k < hg.data.size(); ++k) {
    const double I = image.data[k];
    ih.data[k] = I * hg.data[k];
    i2h.data[k] = I * I * hg.data[k];
    i2.data[k] = I * I;
  }
  const IntegralImage ii_h(hg), ii_ih(ih), ii_i2h(i2h), ii_i(image), ii_i2(i2);

  double total = 0.0;
  const int r = params.patch_radius;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!stats.band.at(x, y)) continue;
      const auto b = detail::clip_patch(x, y, r, w, h);
      const double area = double(b.x1 - b.x0 + 1) * (b.y1 - b.y0 + 1);
      const double sh = ii_h.box(b.x0, b.y0, b.x1, b.y1);
      const double sih = ii_ih.box(b.x0, b.y0, b.x1, b.y1);
      const double si2h = ii_i2h.box(b.x0, b.y0, b.x1, b.y1);
      const double si = ii_i.box(b.x0, b.y0, b.x1, b.y1);
      const double si2 = ii_i2.box(b.x0, b.y0, b.x1, b.y1);
      const double u = stats.u.at(x, y), v = stats.v.at(x, y);
      const double inside = si2h - 2.0 * u * sih + u * u * sh;
      const double outside = (si2 - si2h) - 2.0 * v * (si - sih) + v * v * (area - sh);
      total += inside + outside;
    }
  return total;
}

inline double energy_local(const ScalarGrid& image, const LevelSetField& phi,
                           const ModelParams& params) {
  return energy_local(image, phi, local_stats(image, phi, params), params);
}

/// Shape similarity energy: sum of H_eps(phi) * B_s over the grid. Penalizes
/// interior pixels outside the dead zone of the previous contour.
inline double energy_shape(const LevelSetField& phi, const ScalarGrid& bs, double eps) {
  if (!phi.grid.same_size(bs))
    throw std::invalid_argument("energy_shape: dimension mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < bs.data.size(); ++i)
    total += heaviside_smoothed(phi.grid.data[i], eps) * bs.data[i];
  return total;
}

/// Contour-length regularizer: sum of |grad H_eps(phi)| over interior pixels
/// (central differences).
inline double energy_regularizer(const LevelSetField& phi, double eps) {
  const int w = phi.width(), h = phi.height();
  const ScalarGrid hg = heaviside_field(phi.grid, eps);
  double total = 0.0;
  for (int y = 1; y < h - 1; ++y)
    for (int x = 1; x < w - 1; ++x) {
      const double gx = (hg.at(x + 1, y) - hg.at(x - 1, y)) * 0.5;
      const double gy = (hg.at(x, y + 1) - hg.at(x, y - 1)) * 0.5;
      total += std::sqrt(gx * gx + gy * gy);
    }
  return total;
}

/// Weighted total energy. The shape term contributes only when a previous
/// contour exists; at the coarsest scale it is dropped entirely.
inline double energy_total(const ScalarGrid& image, const LevelSetField& phi,
                           const BinaryMask* previous_contour, const ModelParams& params) {
  double e = params.omega1 * energy_local(image, phi, params) +
             params.omega3 * energy_regularizer(phi, params.heaviside_eps);
  if (previous_contour != nullptr) {
    const ScalarGrid bs = shape_penalty_field(*previous_contour, params.r_s);
    e += params.omega2 * energy_shape(phi, bs, params.heaviside_eps);
  }
  return e;
}

/// Same total with a precomputed shape field and statistics, used inside the
/// evolution loop where both are already available.
inline double energy_total_precomputed(const ScalarGrid& image, const LevelSetField& phi,
                                       const LocalStats& stats, const ScalarGrid* bs,
                                       const ModelParams& params) {
  double e = params.omega1 * energy_local(image, phi, stats, params) +
             params.omega3 * energy_regularizer(phi, params.heaviside_eps);
  if (bs != nullptr) e += params.omega2 * energy_shape(phi, *bs, params.heaviside_eps);
  return e;
}

}  // namespace msac
