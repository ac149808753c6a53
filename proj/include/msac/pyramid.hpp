#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "msac/filters.hpp"
#include "msac/grid.hpp"
#include "msac/level_set.hpp"

namespace msac {

/// Gaussian pyramid, index 0 = original resolution, last = coarsest.
struct PyramidLevels {
  std::vector<ScalarGrid> levels;
  int count() const { return int(levels.size()); }
};

/// One reduction step: 5-tap binomial smoothing (1 4 6 4 1)/16 with mirror
/// borders, then decimation at even indices. Output dims are ceil(n/2).
inline ScalarGrid pyramid_reduce(const ScalarGrid& src) {
  static const std::vector<double> kBinomial5 = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
  const ScalarGrid s = convolve_separable(src, kBinomial5);
  const int cw = (src.width + 1) / 2, ch = (src.height + 1) / 2;
  ScalarGrid out(cw, ch);
  for (int y = 0; y < ch; ++y)
    for (int x = 0; x < cw; ++x) out.at(x, y) = s.at(2 * x, 2 * y);
  return out;
}

/// Coarse-to-fine decomposition. The requested scale count is clamped so
/// that the coarsest level keeps at least 8 px per axis; n_scales = 1 is
/// accepted and returns the original image alone (degenerate schedule).
inline PyramidLevels build_pyramid(const ScalarGrid& image, int n_scales) {
  if (n_scales < 1) throw std::invalid_argument("build_pyramid: n_scales must be >= 1");
  if (image.width < 8 || image.height < 8)
    throw std::invalid_argument("build_pyramid: image smaller than 8x8");
  PyramidLevels p;
  p.levels.push_back(image);
  while (p.count() < n_scales) {
    const ScalarGrid& prev = p.levels.back();
    if ((prev.width + 1) / 2 < 8 || (prev.height + 1) / 2 < 8) break;
    p.levels.push_back(pyramid_reduce(prev));
  }
  return p;
}

/// Bilinear sample with endpoint-aligned coordinates.
inline double bilinear_at(const ScalarGrid& g, double x, double y) {
  x = std::clamp(x, 0.0, double(g.width - 1));
  y = std::clamp(y, 0.0, double(g.height - 1));
  const int x0 = std::min(int(x), g.width - 2 >= 0 ? g.width - 2 : 0);
  const int y0 = std::min(int(y), g.height - 2 >= 0 ? g.height - 2 : 0);
  const int x1 = std::min(x0 + 1, g.width - 1);
  const int y1 = std::min(y0 + 1, g.height - 1);
  const double fx = x - x0, fy = y - y0;
  return (1 - fx) * (1 - fy) * g.at(x0, y0) + fx * (1 - fy) * g.at(x1, y0) +
         (1 - fx) * fy * g.at(x0, y1) + fx * fy * g.at(x1, y1);
}

/// Transfer a coarse-scale level set to a finer grid: bilinear
/// interpolation, magnitude scaled by the axis-average zoom factor, then a
/// full reinitialization to restore the signed distance property. Throws if
/// the target is not 1.5x-2.5x the source per axis, or if the interpolated
/// field has no zero crossing.
inline LevelSetField upsample_levelset(const LevelSetField& coarse, int target_width,
                                       int target_height) {
  const ScalarGrid& g = coarse.grid;
  const double rx = double(target_width) / g.width;
  const double ry = double(target_height) / g.height;
  if (rx < 1.5 || rx > 2.5 || ry < 1.5 || ry > 2.5)
    throw std::invalid_argument("upsample_levelset: dimension ratio out of [1.5, 2.5]");
  const double sx = target_width > 1 ? double(g.width - 1) / (target_width - 1) : 0.0;
  const double sy = target_height > 1 ? double(g.height - 1) / (target_height - 1) : 0.0;
  const double magnify = 0.5 * (rx + ry);
  ScalarGrid fine(target_width, target_height);
  for (int y = 0; y < target_height; ++y)
    for (int x = 0; x < target_width; ++x)
      fine.at(x, y) = magnify * bilinear_at(g, x * sx, y * sy);
  return reinitialize(LevelSetField(std::move(fine)));
}

}  // namespace msac
