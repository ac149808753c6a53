#pragma once

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "msac/grid.hpp"

namespace msac {

namespace detail {

inline int pnm_token(std::istream& in) {
  // skip whitespace and '#' comments, then read one unsigned integer
  for (;;) {
    const int c = in.peek();
    if (c == '#') {
      std::string dummy;
      std::getline(in, dummy);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      break;
    }
  }
  int v = -1;
  in >> v;
  if (!in || v < 0) throw std::runtime_error("PGM: malformed header");
  return v;
}

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};

}  // namespace detail

/// Binary PGM (P5) reader, 8- or 16-bit. Values are scaled to [0, 1] by the
/// file's maxval; the maxval is reported so a round trip is bit-exact.
inline ScalarGrid read_pgm(const std::string& path, int* maxval_out = nullptr) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open image: " + path);
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (magic[0] != 'P' || magic[1] != '5') throw std::runtime_error("PGM: not a binary P5 file: " + path);
  const int w = detail::pnm_token(in);
  const int h = detail::pnm_token(in);
  const int maxval = detail::pnm_token(in);
  if (maxval <= 0 || maxval > 65535) throw std::runtime_error("PGM: bad maxval");
  in.get();  // single whitespace before the raster
  const bool wide = maxval > 255;
  std::vector<unsigned char> raw(std::size_t(w) * h * (wide ? 2 : 1));
  in.read(reinterpret_cast<char*>(raw.data()), std::streamsize(raw.size()));
  if (std::size_t(in.gcount()) != raw.size()) throw std::runtime_error("PGM: truncated raster: " + path);
  ScalarGrid g(w, h);
  for (std::size_t i = 0; i < g.data.size(); ++i) {
    const unsigned v = wide ? (unsigned(raw[2 * i]) << 8) | raw[2 * i + 1] : raw[i];
    g.data[i] = double(v) / maxval;
  }
  if (maxval_out) *maxval_out = maxval;
  return g;
}

/// Binary PGM writer from values in [0, 1] (clamped); maxval 255 or 65535.
inline void write_pgm(const std::string& path, const ScalarGrid& g, int maxval = 255) {
  if (maxval != 255 && maxval != 65535) throw std::invalid_argument("write_pgm: maxval must be 255 or 65535");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write image: " + path);
  out << "P5\n" << g.width << " " << g.height << "\n" << maxval << "\n";
  for (double d : g.data) {
    const unsigned v = unsigned(std::lround(std::clamp(d, 0.0, 1.0) * maxval));
    if (maxval > 255) out.put(char(v >> 8));
    out.put(char(v & 0xff));
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

/// Mask writer: 8-bit PGM, 0 outside, 255 inside.
inline void write_mask_pgm(const std::string& path, const BinaryMask& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write mask: " + path);
  out << "P5\n" << m.width << " " << m.height << "\n255\n";
  for (auto b : m.bits) out.put(b ? char(255) : char(0));
  if (!out) throw std::runtime_error("write failed: " + path);
}

/// Grayscale PNG reader via libpng. Color inputs are converted to gray,
/// alpha is dropped, 16-bit is reduced to 8. Values scaled to [0, 1].
inline ScalarGrid read_png_gray(const std::string& path) {
  std::unique_ptr<std::FILE, detail::FileCloser> fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw std::runtime_error("cannot open image: " + path);
  unsigned char sig[8];
  if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8))
    throw std::runtime_error("PNG: bad signature: " + path);

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("PNG: init failed");
  }
  std::vector<png_bytep> rows;
  std::vector<unsigned char> pixels;
  int w = 0, h = 0;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("PNG: decode error: " + path);
  }
  png_init_io(png, fp.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const png_byte color = png_get_color_type(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color & PNG_COLOR_MASK_COLOR || color == PNG_COLOR_TYPE_PALETTE)
    png_set_rgb_to_gray(png, 1, -1.0, -1.0);
  if (png_get_bit_depth(png, info) == 16) png_set_strip_16(png);
  if (png_get_bit_depth(png, info) < 8) png_set_expand_gray_1_2_4_to_8(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);

  w = int(png_get_image_width(png, info));
  h = int(png_get_image_height(png, info));
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  pixels.resize(rowbytes * h);
  rows.resize(h);
  for (int y = 0; y < h; ++y) rows[y] = pixels.data() + rowbytes * y;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  ScalarGrid g(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) g.at(x, y) = double(pixels[rowbytes * y + x]) / 255.0;
  return g;
}

/// 8-bit grayscale PNG writer from values in [0, 1] (clamped).
inline void write_png_gray(const std::string& path, const ScalarGrid& g) {
  std::unique_ptr<std::FILE, detail::FileCloser> fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw std::runtime_error("cannot write image: " + path);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("PNG: init failed");
  }
  std::vector<unsigned char> pixels(std::size_t(g.width) * g.height);
  std::vector<png_bytep> rows(g.height);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("PNG: encode error: " + path);
  }
  for (std::size_t i = 0; i < pixels.size(); ++i)
    pixels[i] = (unsigned char)std::lround(std::clamp(g.data[i], 0.0, 1.0) * 255.0);
  for (int y = 0; y < g.height; ++y) rows[y] = pixels.data() + std::size_t(y) * g.width;
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, g.width, g.height, 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

/// Load a grayscale image by magic bytes: binary PGM or PNG.
inline ScalarGrid load_image(const std::string& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw std::runtime_error("cannot open image: " + path);
  char head[2] = {0, 0};
  probe.read(head, 2);
  probe.close();
  if (head[0] == 'P' && head[1] == '5') return read_pgm(path);
  if ((unsigned char)head[0] == 0x89 && head[1] == 'P') return read_png_gray(path);
  throw std::runtime_error("unsupported image format (need binary PGM or PNG): " + path);
}

/// Load a binary mask: nonzero pixels are inside.
inline BinaryMask load_mask(const std::string& path) {
  const ScalarGrid g = load_image(path);
  BinaryMask m(g.width, g.height);
  for (std::size_t i = 0; i < g.data.size(); ++i) m.bits[i] = g.data[i] > 0.0 ? 1 : 0;
  return m;
}

/// Input image with the 1-px mask contour burned in at maximum intensity.
inline ScalarGrid overlay_contour(const ScalarGrid& image, const BinaryMask& mask) {
  if (mask.width != image.width || mask.height != image.height)
    throw std::invalid_argument("overlay_contour: dimension mismatch");
  ScalarGrid out = image;
  const BinaryMask edge = mask_boundary(mask);
  for (std::size_t i = 0; i < edge.bits.size(); ++i)
    if (edge.bits[i]) out.data[i] = 1.0;
  return out;
}

}  // namespace msac
