#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace msac {

/// Dense 2D grid of doubles, row-major. Holds images, level-set fields and
/// any derived per-pixel quantity.
struct ScalarGrid {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  ScalarGrid() = default;
  ScalarGrid(int w, int h, double fill = 0.0)
      : width(w), height(h), data(checked_size(w, h), fill) {}

  double& at(int x, int y) { return data[std::size_t(y) * width + x]; }
  double at(int x, int y) const { return data[std::size_t(y) * width + x]; }

  std::size_t size() const { return data.size(); }
  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height;
  }
  bool same_size(const ScalarGrid& o) const {
    return width == o.width && height == o.height;
  }

 private:
  static std::size_t checked_size(int w, int h) {
    if (w <= 0 || h <= 0)
      throw std::invalid_argument("ScalarGrid: dimensions must be positive");
    return std::size_t(w) * std::size_t(h);
  }
};

/// Per-pixel boolean region, true = inside.
struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  BinaryMask() = default;
  BinaryMask(int w, int h, bool fill = false)
      : width(w), height(h) {
    if (w <= 0 || h <= 0)
      throw std::invalid_argument("BinaryMask: dimensions must be positive");
    bits.assign(std::size_t(w) * h, fill ? 1 : 0);
  }

  bool at(int x, int y) const { return bits[std::size_t(y) * width + x] != 0; }
  void set(int x, int y, bool v) { bits[std::size_t(y) * width + x] = v ? 1 : 0; }

  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height;
  }
  bool same_size(const BinaryMask& o) const {
    return width == o.width && height == o.height;
  }

  int count() const {
    int n = 0;
    for (auto b : bits) n += (b != 0);
    return n;
  }

  bool operator==(const BinaryMask& o) const {
    return width == o.width && height == o.height && bits == o.bits;
  }
};

inline BinaryMask complement(const BinaryMask& m) {
  BinaryMask out(m.width, m.height);
  for (std::size_t i = 0; i < m.bits.size(); ++i) out.bits[i] = m.bits[i] ? 0 : 1;
  return out;
}

/// Inner boundary of a mask: inside pixels with an 8-connected outside
/// neighbour. Pixels on the image border count their out-of-grid side as
/// outside, so clipped regions still produce a closed contour.
inline BinaryMask mask_boundary(const BinaryMask& m) {
  BinaryMask out(m.width, m.height);
  for (int y = 0; y < m.height; ++y) {
    for (int x = 0; x < m.width; ++x) {
      if (!m.at(x, y)) continue;
      bool edge = false;
      for (int dy = -1; dy <= 1 && !edge; ++dy)
        for (int dx = -1; dx <= 1 && !edge; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const int nx = x + dx, ny = y + dy;
          if (!m.in_bounds(nx, ny) || !m.at(nx, ny)) edge = true;
        }
      if (edge) out.set(x, y, true);
    }
  }
  return out;
}

/// Min-max normalization to [0, 1]. A constant image maps to all zeros.
inline ScalarGrid normalized(const ScalarGrid& img) {
  double lo = img.data[0], hi = img.data[0];
  for (double v : img.data) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  ScalarGrid out(img.width, img.height);
  if (hi > lo) {
    const double s = 1.0 / (hi - lo);
    for (std::size_t i = 0; i < img.data.size(); ++i)
      out.data[i] = (img.data[i] - lo) * s;
  }
  return out;
}

}  // namespace msac
