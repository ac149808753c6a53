#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "msac/grid.hpp"

namespace msac {

// Mirror reflection without edge repeat: -1 -> 1, n -> n-2.
inline int reflect_index(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * n - 2 - i;
  }
  return i;
}

/// Separable convolution with an odd symmetric kernel, mirror borders.
inline ScalarGrid convolve_separable(const ScalarGrid& src, const std::vector<double>& kernel) {
  if (kernel.size() % 2 == 0) throw std::invalid_argument("convolve_separable: kernel must be odd");
  const int r = int(kernel.size()) / 2;
  const int w = src.width, h = src.height;
  ScalarGrid tmp(w, h), out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -r; k <= r; ++k)
        acc += kernel[k + r] * src.at(reflect_index(x + k, w), y);
      tmp.at(x, y) = acc;
    }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -r; k <= r; ++k)
        acc += kernel[k + r] * tmp.at(x, reflect_index(y + k, h));
      out.at(x, y) = acc;
    }
  return out;
}

/// Gaussian blur, kernel truncated at 3 sigma and renormalized.
inline ScalarGrid gaussian_blur(const ScalarGrid& src, double sigma) {
  if (sigma <= 0.0) return src;
  const int r = std::max(1, int(std::ceil(3.0 * sigma)));
  std::vector<double> k(std::size_t(2 * r + 1));
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) {
    k[i + r] = std::exp(-0.5 * (double(i) / sigma) * (double(i) / sigma));
    sum += k[i + r];
  }
  for (auto& v : k) v /= sum;
  return convolve_separable(src, k);
}

}  // namespace msac
