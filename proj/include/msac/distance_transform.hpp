#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "msac/grid.hpp"

namespace msac {

namespace detail {

// Felzenszwalb-Huttenlocher lower envelope over one row of squared vertical
// distances. f holds integer values (exact in double up to 2^53), so the
// envelope decisions and the final (x - v)^2 + f[v] sums are exact.
inline void edt_row(const std::vector<std::int64_t>& f, int y, int w,
                    std::vector<std::int64_t>& out,
                    std::vector<int>& v, std::vector<double>& z) {
  const std::int64_t* fr = f.data() + std::size_t(y) * w;
  int k = 0;
  v[0] = 0;
  z[0] = -1e30;
  z[1] = 1e30;
  for (int q = 1; q < w; ++q) {
    double s;
    for (;;) {
      const int p = v[k];
      s = (double(fr[q] + std::int64_t(q) * q) - double(fr[p] + std::int64_t(p) * p)) /
          (2.0 * q - 2.0 * p);
      if (s > z[k]) break;
      --k;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = 1e30;
  }
  k = 0;
  std::int64_t* orow = out.data() + std::size_t(y) * w;
  for (int x = 0; x < w; ++x) {
    while (z[k + 1] < x) ++k;
    const std::int64_t dx = x - v[k];
    orow[x] = dx * dx + fr[v[k]];
  }
}

}  // namespace detail

/// Exact squared Euclidean distance from every pixel to the nearest set
/// pixel. Two-pass algorithm: per-column scans give exact vertical
/// distances, then a parabola envelope per row. Throws if the set is empty.
inline std::vector<std::int64_t> squared_distance_to_set(const BinaryMask& set) {
  const int w = set.width, h = set.height;
  const std::int64_t big = std::int64_t(w) + h + 2;  // farther than any real distance

  bool any = false;
  std::vector<std::int64_t> f(std::size_t(w) * h);
  for (int x = 0; x < w; ++x) {
    std::int64_t d = big;
    for (int y = 0; y < h; ++y) {
      if (set.at(x, y)) { d = 0; any = true; }
      else if (d < big) ++d;
      f[std::size_t(y) * w + x] = d;
    }
    d = f[std::size_t(h - 1) * w + x];
    for (int y = h - 2; y >= 0; --y) {
      auto& cur = f[std::size_t(y) * w + x];
      if (d < big && d + 1 < cur) cur = d + 1;
      d = cur;
    }
  }
  if (!any) throw std::invalid_argument("squared_distance_to_set: empty set");

  for (auto& val : f) val *= val;

  std::vector<std::int64_t> out(f.size());
  std::vector<int> v(w);
  std::vector<double> z(std::size_t(w) + 1);
  for (int y = 0; y < h; ++y) detail::edt_row(f, y, w, out, v, z);
  return out;
}

/// Unsigned Euclidean distance to the nearest boundary pixel; zero on the
/// boundary itself. Input is the boundary as a pixel set.
inline ScalarGrid distance_transform(const BinaryMask& boundary) {
  auto sq = squared_distance_to_set(boundary);
  ScalarGrid out(boundary.width, boundary.height);
  for (std::size_t i = 0; i < sq.size(); ++i) out.data[i] = std::sqrt(double(sq[i]));
  return out;
}

}  // namespace msac
