#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "msac/energies.hpp"
#include "msac/filters.hpp"
#include "msac/grid.hpp"
#include "msac/level_set.hpp"

namespace msac {

enum class StopReason { tolerance, max_iters, degenerate_field };

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::tolerance: return "tolerance";
    case StopReason::max_iters: return "max_iters";
    case StopReason::degenerate_field: return "degenerate_field";
  }
  return "?";
}

struct EvolutionReport {
  int iterations_run = 0;
  double final_energy = 0.0;
  // One entry per iteration. Energies are evaluated on the reinitialized
  // (canonical signed-distance) embedding of the iterate: the raw field's
  // energy depends on the profile steepness around the same contour, which
  // the periodic rebuilds reset, so only the canonical reading is
  // comparable across iterations.
  std::vector<double> energy_trace;
  bool converged = false;
  StopReason stop_reason = StopReason::max_iters;
};

/// Chan-Vese baseline parameters. Defaults follow the published two-phase
/// model on 8-bit intensities (nu = 0.01 * 255^2); inputs in [0, 1] are
/// rescaled internally to that range.
struct CvParams {
  double nu = 650.25;  // arc-length weight
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double eps = 0.01;
  double dt = 0.1;
  int max_iters = 500;
};

/// DRLSE baseline parameters (canonical double-well formulation, c0 = 2,
/// cosine Dirac width 1.5). Same 8-bit intensity convention as CvParams.
struct DrlseParams {
  double dt = 1.0;
  double mu = 0.2;      // distance regularization
  double lambda = 5.0;  // weighted length
  double alpha = -3.0;  // weighted area; negative expands (interior-positive phi)
  double sigma = 1.5;   // edge-map smoothing
  int max_iters = 500;
};

namespace detail {

inline bool all_finite(const ScalarGrid& g) {
  for (double v : g.data)
    if (!std::isfinite(v)) return false;
  return true;
}

// Relative energy change over a trailing 10-iteration window.
inline bool window_converged(const std::vector<double>& trace, double tol) {
  if (tol <= 0.0 || trace.size() < 11) return false;
  const double now = trace.back();
  const double then = trace[trace.size() - 11];
  const double denom = std::max(std::abs(then), 1e-12);
  return std::abs(now - then) / denom < tol;
}

// Explicit Euler step with the stability guard: if the largest |update|*dt
// exceeds 1 px of phi change, the whole step is rescaled to that cap.
inline void euler_step(ScalarGrid& phi, const ScalarGrid& update, double dt) {
  double peak = 0.0;
  for (double v : update.data) peak = std::max(peak, std::abs(v));
  const double step = (peak * dt > 1.0) ? 1.0 / peak : dt;
  for (std::size_t i = 0; i < phi.data.size(); ++i) phi.data[i] += step * update.data[i];
}

}  // namespace detail

/// Update field of the proposed flow: the negative discrete gradient of the
/// weighted energy. Band pixels receive the local-region and shape forces;
/// every pixel receives the length regularization.
///
/// The local force at z collects (I(z)-u(x))^2 - (I(z)-v(x))^2 over the band
/// centers x whose patch contains z (the exact adjoint of the energy's
/// patch sum), which expands to patch box sums of (u-v) and (u^2-v^2). The
/// regularizer force is the exact adjoint of the discrete |grad H| sum:
/// delta(phi) times the divergence of the normalized H-gradient.
inline ScalarGrid update_field_proposed(const ScalarGrid& image, const LevelSetField& phi,
                                        const LocalStats& stats, const ScalarGrid* bs,
                                        const ModelParams& params) {
  if (!image.same_size(phi.grid))
    throw std::invalid_argument("update_field_proposed: image/phi dimension mismatch");
  if (bs != nullptr && !bs->same_size(image))
    throw std::invalid_argument("update_field_proposed: shape field dimension mismatch");
  const int w = image.width, h = image.height;
  const double eps = params.heaviside_eps;

  ScalarGrid duv(w, h), duv2(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!stats.band.at(x, y)) continue;
      const double u = stats.u.at(x, y), v = stats.v.at(x, y);
      duv.at(x, y) = u - v;
      duv2.at(x, y) = u * u - v * v;
    }
  const IntegralImage ii_duv(duv), ii_duv2(duv2);

  // Normalized gradient of H(phi) on interior pixels, zero elsewhere; its
  // central divergence below is the descent direction of the discrete
  // regularizer.
  const ScalarGrid hg = heaviside_field(phi.grid, eps);
  ScalarGrid mx(w, h), my(w, h);
  for (int y = 1; y < h - 1; ++y)
    for (int x = 1; x < w - 1; ++x) {
      const double gx = (hg.at(x + 1, y) - hg.at(x - 1, y)) * 0.5;
      const double gy = (hg.at(x, y + 1) - hg.at(x, y - 1)) * 0.5;
      const double mag = std::max(std::sqrt(gx * gx + gy * gy), 1e-8);
      mx.at(x, y) = gx / mag;
      my.at(x, y) = gy / mag;
    }

  ScalarGrid out(w, h);
  const int r = params.patch_radius;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double del = dirac_smoothed(phi.grid.at(x, y), eps);
      const double div_m =
          ((x + 1 < w ? mx.at(x + 1, y) : 0.0) - (x - 1 >= 0 ? mx.at(x - 1, y) : 0.0)) * 0.5 +
          ((y + 1 < h ? my.at(x, y + 1) : 0.0) - (y - 1 >= 0 ? my.at(x, y - 1) : 0.0)) * 0.5;
      double f = params.omega3 * del * div_m;
      if (stats.band.at(x, y)) {
        const auto b = detail::clip_patch(x, y, r, w, h);
        const double s1 = ii_duv.box(b.x0, b.y0, b.x1, b.y1);
        const double s2 = ii_duv2.box(b.x0, b.y0, b.x1, b.y1);
        // sum over centers of (I-u)^2 - (I-v)^2 = -2 I (u-v) + (u^2-v^2)
        f += params.omega1 * (-del) * (-2.0 * image.at(x, y) * s1 + s2);
        if (bs != nullptr) f += params.omega2 * (-del) * bs->at(x, y);
      }
      out.at(x, y) = f;
    }
  return out;
}

/// One explicit Euler step of the proposed flow. Statistics must be fresh
/// for the current phi.
inline LevelSetField step_proposed(const ScalarGrid& image, const LevelSetField& phi,
                                   const LocalStats& stats, const ScalarGrid* bs,
                                   const ModelParams& params) {
  const ScalarGrid upd = update_field_proposed(image, phi, stats, bs, params);
  LevelSetField next = phi;
  detail::euler_step(next.grid, upd, params.dt);
  return next;
}

/// Full evolution of the proposed model at one scale. Statistics are
/// recomputed every iteration, phi is reinitialized to a signed distance
/// field every 20 iterations, and the loop stops on the energy window test,
/// the iteration budget, or a degenerate field.
inline std::pair<LevelSetField, EvolutionReport> evolve_proposed(const ScalarGrid& image,
                                                                 const LevelSetField& phi0,
                                                                 const BinaryMask* previous_contour,
                                                                 const ModelParams& params) {
  params.validate();
  if (!image.same_size(phi0.grid))
    throw std::invalid_argument("evolve_proposed: image/phi dimension mismatch");
  if (image.width < 4 || image.height < 4)
    throw std::invalid_argument("evolve_proposed: grid must be at least 4x4");

  std::optional<ScalarGrid> bs;
  if (previous_contour != nullptr) bs = shape_penalty_field(*previous_contour, params.r_s);
  const ScalarGrid* bs_ptr = bs ? &*bs : nullptr;

  // Canonical-embedding energy of the current contour; flags a vanished
  // interior or exterior instead of throwing.
  auto recorded_energy = [&](const LevelSetField& f, bool& degenerate) {
    try {
      const LevelSetField c = reinitialize(f);
      return energy_total_precomputed(image, c, local_stats(image, c, params), bs_ptr, params);
    } catch (const std::invalid_argument&) {
      degenerate = true;
      return 0.0;
    }
  };

  LevelSetField phi = phi0;
  EvolutionReport rep;
  if (params.max_iters_per_scale == 0) {
    bool degenerate = false;
    const double e = recorded_energy(phi, degenerate);
    rep.final_energy = degenerate
        ? energy_total_precomputed(image, phi, local_stats(image, phi, params), bs_ptr, params)
        : e;
    return {std::move(phi), std::move(rep)};
  }

  LocalStats stats = local_stats(image, phi, params);
  for (int it = 1; it <= params.max_iters_per_scale; ++it) {
    const ScalarGrid upd = update_field_proposed(image, phi, stats, bs_ptr, params);
    detail::euler_step(phi.grid, upd, params.dt);
    rep.iterations_run = it;

    bool degenerate = !detail::all_finite(phi.grid);
    if (!degenerate && it % 20 == 0) {
      try {
        phi = reinitialize(phi);
      } catch (const std::invalid_argument&) {  // interior or exterior vanished
        degenerate = true;
      }
    }
    double energy = 0.0;
    if (!degenerate) energy = recorded_energy(phi, degenerate);
    if (degenerate) {
      rep.stop_reason = StopReason::degenerate_field;
      if (!rep.energy_trace.empty()) rep.final_energy = rep.energy_trace.back();
      return {std::move(phi), std::move(rep)};
    }
    rep.energy_trace.push_back(energy);
    if (detail::window_converged(rep.energy_trace, params.convergence_tol)) {
      rep.converged = true;
      rep.stop_reason = StopReason::tolerance;
      break;
    }
    stats = local_stats(image, phi, params);
  }
  rep.final_energy = rep.energy_trace.back();
  return {std::move(phi), std::move(rep)};
}

/// Two-phase Chan-Vese evolution with global means, same stopping and
/// reinitialization policy as the proposed model.
inline std::pair<LevelSetField, EvolutionReport> evolve_cv(const ScalarGrid& image,
                                                           const LevelSetField& phi0,
                                                           const CvParams& p) {
  if (!image.same_size(phi0.grid))
    throw std::invalid_argument("evolve_cv: image/phi dimension mismatch");
  const int w = image.width, h = image.height;

  ScalarGrid img(w, h);  // 8-bit intensity convention of the published model
  for (std::size_t i = 0; i < img.data.size(); ++i) img.data[i] = image.data[i] * 255.0;

  auto means = [&](const LevelSetField& phi, double& u1, double& u2) {
    double s1 = 0, s2 = 0;
    int n1 = 0, n2 = 0;
    for (std::size_t i = 0; i < img.data.size(); ++i) {
      if (phi.grid.data[i] > 0.0) { s1 += img.data[i]; ++n1; }
      else { s2 += img.data[i]; ++n2; }
    }
    u1 = n1 > 0 ? s1 / n1 : 0.0;
    u2 = n2 > 0 ? s2 / n2 : 0.0;
    return n1 > 0 && n2 > 0;
  };
  auto energy = [&](const LevelSetField& phi, double u1, double u2) {
    double e = p.nu * energy_regularizer(phi, p.eps);
    for (std::size_t i = 0; i < img.data.size(); ++i) {
      const double hh = heaviside_smoothed(phi.grid.data[i], p.eps);
      const double d1 = img.data[i] - u1, d2 = img.data[i] - u2;
      e += p.lambda1 * d1 * d1 * hh + p.lambda2 * d2 * d2 * (1.0 - hh);
    }
    return e;
  };

  LevelSetField phi = phi0;
  EvolutionReport rep;
  double u1 = 0, u2 = 0;
  for (int it = 1; it <= p.max_iters; ++it) {
    if (!means(phi, u1, u2)) {
      rep.stop_reason = StopReason::degenerate_field;
      break;
    }
    ScalarGrid upd(w, h);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const double del = dirac_smoothed(phi.grid.at(x, y), p.eps);
        const double kap = (x >= 1 && y >= 1 && x <= w - 2 && y <= h - 2)
                               ? curvature(phi, x, y) : 0.0;
        const double d1 = img.at(x, y) - u1, d2 = img.at(x, y) - u2;
        upd.at(x, y) = del * (p.nu * kap - p.lambda1 * d1 * d1 + p.lambda2 * d2 * d2);
      }
    detail::euler_step(phi.grid, upd, p.dt);
    rep.iterations_run = it;
    if (!detail::all_finite(phi.grid)) {
      rep.stop_reason = StopReason::degenerate_field;
      break;
    }
    if (it % 20 == 0) {
      try {
        phi = reinitialize(phi);
      } catch (const std::invalid_argument&) {
        rep.stop_reason = StopReason::degenerate_field;
        break;
      }
    }
    means(phi, u1, u2);
    rep.energy_trace.push_back(energy(phi, u1, u2));
    if (detail::window_converged(rep.energy_trace, 1e-6)) {
      rep.converged = true;
      rep.stop_reason = StopReason::tolerance;
      break;
    }
  }
  if (!rep.energy_trace.empty()) rep.final_energy = rep.energy_trace.back();
  return {std::move(phi), std::move(rep)};
}

namespace detail {

// Cosine-window Dirac and Heaviside used by DRLSE (width eps, here 1.5).
inline double dirac_cos(double z, double eps) {
  if (std::abs(z) > eps) return 0.0;
  return (1.0 / (2.0 * eps)) * (1.0 + std::cos(std::numbers::pi * z / eps));
}
inline double heaviside_cos(double z, double eps) {
  if (z > eps) return 1.0;
  if (z < -eps) return 0.0;
  return 0.5 * (1.0 + z / eps + std::sin(std::numbers::pi * z / eps) / std::numbers::pi);
}

inline double at_clamped(const ScalarGrid& g, int x, int y) {
  return g.at(std::clamp(x, 0, g.width - 1), std::clamp(y, 0, g.height - 1));
}

inline void central_gradient(const ScalarGrid& g, ScalarGrid& gx, ScalarGrid& gy) {
  for (int y = 0; y < g.height; ++y)
    for (int x = 0; x < g.width; ++x) {
      gx.at(x, y) = (at_clamped(g, x + 1, y) - at_clamped(g, x - 1, y)) * 0.5;
      gy.at(x, y) = (at_clamped(g, x, y + 1) - at_clamped(g, x, y - 1)) * 0.5;
    }
}

}  // namespace detail

/// Binary-step initialization used by DRLSE: +c0 inside, -c0 outside.
inline LevelSetField binary_step_levelset(const BinaryMask& mask, double c0 = 2.0) {
  ScalarGrid phi(mask.width, mask.height);
  for (std::size_t i = 0; i < phi.data.size(); ++i) phi.data[i] = mask.bits[i] ? c0 : -c0;
  return LevelSetField(std::move(phi));
}

/// Distance-regularized level set evolution (double-well potential). The
/// distance regularization replaces reinitialization entirely. phi is
/// interior-positive here, so the expansion force enters as -alpha g delta.
inline std::pair<LevelSetField, EvolutionReport> evolve_drlse(const ScalarGrid& image,
                                                              const LevelSetField& phi0,
                                                              const DrlseParams& p) {
  if (!image.same_size(phi0.grid))
    throw std::invalid_argument("evolve_drlse: image/phi dimension mismatch");
  const int w = image.width, h = image.height;
  constexpr double kEps = 1.5;  // cosine Dirac width
  constexpr double kTiny = 1e-10;

  ScalarGrid img(w, h);
  for (std::size_t i = 0; i < img.data.size(); ++i) img.data[i] = image.data[i] * 255.0;
  const ScalarGrid smooth = gaussian_blur(img, p.sigma);
  ScalarGrid sx(w, h), sy(w, h);
  detail::central_gradient(smooth, sx, sy);
  ScalarGrid g(w, h);
  for (std::size_t i = 0; i < g.data.size(); ++i)
    g.data[i] = 1.0 / (1.0 + sx.data[i] * sx.data[i] + sy.data[i] * sy.data[i]);
  ScalarGrid gx(w, h), gy(w, h);
  detail::central_gradient(g, gx, gy);

  LevelSetField phi = phi0;
  EvolutionReport rep;
  ScalarGrid px(w, h), py(w, h), nx(w, h), ny(w, h), dwx(w, h), dwy(w, h);

  auto energy = [&](const LevelSetField& f) {
    detail::central_gradient(f.grid, px, py);
    double e = 0.0;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const double s = std::sqrt(px.at(x, y) * px.at(x, y) + py.at(x, y) * py.at(x, y));
        const double pw = s <= 1.0
            ? (1.0 - std::cos(2.0 * std::numbers::pi * s)) / (4.0 * std::numbers::pi * std::numbers::pi)
            : 0.5 * (s - 1.0) * (s - 1.0);
        e += p.mu * pw + p.lambda * g.at(x, y) * detail::dirac_cos(f.grid.at(x, y), kEps) * s +
             p.alpha * g.at(x, y) * detail::heaviside_cos(f.grid.at(x, y), kEps);
      }
    return e;
  };

  for (int it = 1; it <= p.max_iters; ++it) {
    detail::central_gradient(phi.grid, px, py);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const double ax = px.at(x, y), ay = py.at(x, y);
        const double s = std::sqrt(ax * ax + ay * ay);
        // double-well derivative ratio d_p(s) = p'(s)/s
        double dps;
        if (s <= 1.0) {
          const double ps = s > kTiny ? std::sin(2.0 * std::numbers::pi * s) / (2.0 * std::numbers::pi) : 0.0;
          dps = s > kTiny ? ps / s : 1.0;  // limit of sin(2 pi s)/(2 pi s)
        } else {
          dps = (s - 1.0) / s;
        }
        dwx.at(x, y) = dps * ax - ax;
        dwy.at(x, y) = dps * ay - ay;
        const double inv = 1.0 / (s + kTiny);
        nx.at(x, y) = ax * inv;
        ny.at(x, y) = ay * inv;
      }

    ScalarGrid upd(w, h);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const double div_dw =
            (detail::at_clamped(dwx, x + 1, y) - detail::at_clamped(dwx, x - 1, y)) * 0.5 +
            (detail::at_clamped(dwy, x, y + 1) - detail::at_clamped(dwy, x, y - 1)) * 0.5;
        const double lap = detail::at_clamped(phi.grid, x + 1, y) + detail::at_clamped(phi.grid, x - 1, y) +
                           detail::at_clamped(phi.grid, x, y + 1) + detail::at_clamped(phi.grid, x, y - 1) -
                           4.0 * phi.grid.at(x, y);
        const double div_gn =
            (detail::at_clamped(nx, x + 1, y) - detail::at_clamped(nx, x - 1, y)) * 0.5 +
            (detail::at_clamped(ny, x, y + 1) - detail::at_clamped(ny, x, y - 1)) * 0.5;
        const double del = detail::dirac_cos(phi.grid.at(x, y), kEps);
        const double edge = del * (gx.at(x, y) * nx.at(x, y) + gy.at(x, y) * ny.at(x, y)) +
                            del * g.at(x, y) * div_gn;
        const double area = g.at(x, y) * del;
        upd.at(x, y) = p.mu * (div_dw + lap) + p.lambda * edge - p.alpha * area;
      }
    for (std::size_t i = 0; i < phi.grid.data.size(); ++i)
      phi.grid.data[i] += p.dt * upd.data[i];
    rep.iterations_run = it;

    if (!detail::all_finite(phi.grid)) {
      rep.stop_reason = StopReason::degenerate_field;
      break;
    }
    rep.energy_trace.push_back(energy(phi));
    if (detail::window_converged(rep.energy_trace, 1e-6)) {
      rep.converged = true;
      rep.stop_reason = StopReason::tolerance;
      break;
    }
  }
  if (!rep.energy_trace.empty()) rep.final_energy = rep.energy_trace.back();
  return {std::move(phi), std::move(rep)};
}

}  // namespace msac
