#pragma once

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "msac/energies.hpp"
#include "msac/evolution.hpp"
#include "msac/grid.hpp"
#include "msac/level_set.hpp"
#include "msac/pyramid.hpp"

namespace msac {

/// Initialization ellipse in finest-scale pixel coordinates.
struct SeedEllipse {
  double cx = 0.0, cy = 0.0;
  double a = 0.0, b = 0.0;
};

struct PipelineConfig {
  int n_scales = 5;
  ModelParams model;
  SeedEllipse seed;
};

struct PipelineResult {
  BinaryMask final_mask;                          // finest scale
  std::vector<BinaryMask> per_scale_masks;        // coarsest first
  std::vector<EvolutionReport> per_scale_reports; // same order
  double total_wall_time = 0.0;                   // seconds
  bool completed = false;
  int failed_scale = -1;  // pyramid level index (0 = finest) when aborted
};

inline BinaryMask rasterize_ellipse(const SeedEllipse& e, int w, int h) {
  BinaryMask m(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double dx = (x - e.cx) / e.a, dy = (y - e.cy) / e.b;
      if (dx * dx + dy * dy <= 1.0) m.set(x, y, true);
    }
  return m;
}

/// Signed distance field of the seed ellipse interior (clipped to the grid).
inline LevelSetField seed_to_levelset(const SeedEllipse& seed, int w, int h) {
  if (!(seed.a > 0.0) || !(seed.b > 0.0))
    throw std::invalid_argument("seed_to_levelset: semi-axes must be positive");
  const BinaryMask m = rasterize_ellipse(seed, w, h);
  const int n = m.count();
  if (n == 0) throw std::invalid_argument("seed_to_levelset: seed ellipse outside the grid");
  if (std::size_t(n) == m.bits.size())
    throw std::invalid_argument("seed_to_levelset: seed ellipse covers the whole grid");
  return levelset_from_mask(m);
}

/// Coarse-to-fine segmentation: decompose, segment the coarsest level with
/// no shape term, then for each finer level seed from the upsampled result
/// and evolve with the shape constraint anchored to the transferred contour.
/// A degenerate evolution aborts the run, reporting the failing level index
/// along with the partial per-scale results.
inline PipelineResult run_pipeline(const ScalarGrid& image, const PipelineConfig& cfg) {
  if (image.width < 32 || image.height < 32)
    throw std::invalid_argument("run_pipeline: image must be at least 32x32");
  cfg.model.validate();
  const auto t0 = std::chrono::steady_clock::now();

  const ScalarGrid norm = normalized(image);
  const PyramidLevels pyr = build_pyramid(norm, cfg.n_scales);
  const int n = pyr.count();

  PipelineResult res;
  auto finish = [&](bool ok, int failed) {
    res.completed = ok;
    res.failed_scale = failed;
    res.total_wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
  };

  // Seed at the coarsest level, endpoint-aligned with the upsampling map.
  const ScalarGrid& coarse = pyr.levels[n - 1];
  const double sx = image.width > 1 ? double(coarse.width - 1) / (image.width - 1) : 1.0;
  const double sy = image.height > 1 ? double(coarse.height - 1) / (image.height - 1) : 1.0;
  SeedEllipse cs{cfg.seed.cx * sx, cfg.seed.cy * sy, cfg.seed.a * sx, cfg.seed.b * sy};
  LevelSetField phi = seed_to_levelset(cs, coarse.width, coarse.height);

  auto [phi1, rep1] = evolve_proposed(coarse, phi, nullptr, cfg.model);
  phi = std::move(phi1);
  res.per_scale_masks.push_back(mask_from_levelset(phi));
  res.per_scale_reports.push_back(std::move(rep1));
  if (res.per_scale_reports.back().stop_reason == StopReason::degenerate_field)
    return finish(false, n - 1);

  for (int k = n - 2; k >= 0; --k) {
    const ScalarGrid& level = pyr.levels[k];
    LevelSetField init;
    try {
      init = upsample_levelset(phi, level.width, level.height);
    } catch (const std::invalid_argument&) {  // constant-sign transfer
      return finish(false, k);
    }
    const BinaryMask prev_contour = mask_boundary(mask_from_levelset(init));
    auto [phik, repk] = evolve_proposed(level, init, &prev_contour, cfg.model);
    phi = std::move(phik);
    res.per_scale_masks.push_back(mask_from_levelset(phi));
    res.per_scale_reports.push_back(std::move(repk));
    if (res.per_scale_reports.back().stop_reason == StopReason::degenerate_field)
      return finish(false, k);
  }

  res.final_mask = res.per_scale_masks.back();
  return finish(true, -1);
}

}  // namespace msac
