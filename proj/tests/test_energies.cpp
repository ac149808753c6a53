#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "msac/energies.hpp"
#include "oracles.hpp"

using namespace msac;

namespace {

ModelParams small_params() {
  ModelParams p;
  p.patch_radius = 2;
  p.band_halfwidth = 3.0;
  p.heaviside_eps = 1.0;
  return p;
}

}  // namespace

TEST_CASE("band_indicator on a disk SDF is an annulus") {
  const LevelSetField phi(oracle::disk_sdf(40, 40, 20, 20, 10.0));
  const BinaryMask band = band_indicator(phi, 3.0);
  for (int y = 0; y < 40; ++y)
    for (int x = 0; x < 40; ++x) {
      const double r = std::hypot(x - 20, y - 20);
      if (band.at(x, y)) {
        REQUIRE(std::abs(phi.grid.at(x, y)) < 3.0);
        REQUIRE(r > 6.9);
        REQUIRE(r < 13.1);
      }
    }
  REQUIRE(band.count() > 0);
}

TEST_CASE("band_indicator halfwidth 0.5 on an integer ramp hits one column") {
  ScalarGrid g(9, 4);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 9; ++x) g.at(x, y) = double(x - 4);  // zero at column 4
  const BinaryMask band = band_indicator(LevelSetField(g), 0.5);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 9; ++x) REQUIRE(band.at(x, y) == (x == 4));
}

TEST_CASE("band of the complemented field equals band of the original") {
  std::mt19937 rng(47);
  const LevelSetField phi = levelset_from_mask(oracle::random_blob(rng, 24, 18));
  ScalarGrid neg = phi.grid;
  for (auto& v : neg.data) v = -v;
  REQUIRE(band_indicator(phi, 4.0) == band_indicator(LevelSetField(neg), 4.0));
}

TEST_CASE("local_stats on a binary step image gives u=1, v=0") {
  const int n = 16;
  const LevelSetField phi(oracle::disk_sdf(n, n, 8, 8, 5.0));
  ScalarGrid img(n, n);
  for (std::size_t i = 0; i < img.data.size(); ++i) img.data[i] = phi.grid.data[i] > 0 ? 1.0 : 0.0;
  const ModelParams p = small_params();
  const LocalStats st = local_stats(img, phi, p);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      if (!st.band.at(x, y)) continue;
      // both sides present near the contour with patch radius 2
      if (std::abs(phi.grid.at(x, y)) < 2.0) {
        REQUIRE(st.u.at(x, y) == Catch::Approx(1.0));
        REQUIRE(st.v.at(x, y) == Catch::Approx(0.0).margin(1e-12));
      }
    }
}

TEST_CASE("local_stats constant image gives u = v = c") {
  const LevelSetField phi(oracle::disk_sdf(20, 20, 10, 10, 6.0));
  const ScalarGrid img(20, 20, 0.42);
  const LocalStats st = local_stats(img, phi, small_params());
  for (int y = 0; y < 20; ++y)
    for (int x = 0; x < 20; ++x) {
      if (!st.band.at(x, y)) continue;
      REQUIRE(st.u.at(x, y) == Catch::Approx(0.42));
      REQUIRE(st.v.at(x, y) == Catch::Approx(0.42));
    }
}

TEST_CASE("local_stats matches the hand oracle on random instances") {
  std::mt19937 rng(53);
  for (int trial = 0; trial < 10; ++trial) {
    const int w = 8 + int(rng() % 9), h = 8 + int(rng() % 9);
    const ScalarGrid img = oracle::smooth_noise_image(rng, w, h);
    const LevelSetField phi = levelset_from_mask(oracle::random_blob(rng, w, h));
    ModelParams p = small_params();
    p.patch_radius = 1;
    const LocalStats st = local_stats(img, phi, p);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        if (!st.band.at(x, y)) continue;
        double u, v;
        oracle::naive_patch_means(img, phi.grid, x, y, 1, u, v);
        REQUIRE(st.u.at(x, y) == Catch::Approx(u).margin(1e-12));
        REQUIRE(st.v.at(x, y) == Catch::Approx(v).margin(1e-12));
      }
  }
}

TEST_CASE("local_stats rejects dimension mismatch") {
  const LevelSetField phi(ScalarGrid(8, 8, 1.0));
  REQUIRE_THROWS_AS(local_stats(ScalarGrid(8, 9, 0.0), phi, small_params()), std::invalid_argument);
}

TEST_CASE("shape_penalty_field branches") {
  BinaryMask contour(12, 12);
  contour.set(0, 0, true);

  SECTION("dead zone covering the whole grid") {
    const ScalarGrid bs = shape_penalty_field(contour, 100.0);
    for (double v : bs.data) REQUIRE(v == 0.0);
  }
  SECTION("r_s = 0 keeps the raw distance transform") {
    const ScalarGrid bs = shape_penalty_field(contour, 0.0);
    const ScalarGrid d = distance_transform(contour);
    for (std::size_t i = 0; i < bs.data.size(); ++i) REQUIRE(bs.data[i] == d.data[i]);
  }
  SECTION("3-4-5 pixel vs dead zone") {
    const ScalarGrid bs = shape_penalty_field(contour, 4.0);
    REQUIRE(bs.at(3, 4) == Catch::Approx(5.0));
    REQUIRE(bs.at(2, 2) == 0.0);  // distance 2.83 < 4
  }
  SECTION("empty contour throws") {
    REQUIRE_THROWS_AS(shape_penalty_field(BinaryMask(8, 8), 3.0), std::invalid_argument);
  }
}

TEST_CASE("energy_local perfect two-phase fit is ~0") {
  // image exactly equal to H_eps(phi) with phi sharpened enough that the
  // arctan tail is negligible; patch means then match u=1 / v=0
  const int n = 24;
  LevelSetField phi(oracle::disk_sdf(n, n, 12, 12, 7.0));
  for (auto& v : phi.grid.data) v *= 1e8;
  ModelParams p = small_params();
  p.band_halfwidth = 1e10;  // keep the whole grid in the band
  const ScalarGrid img = heaviside_field(phi.grid, p.heaviside_eps);
  const double e = energy_local(img, phi, p);
  REQUIRE(e >= 0.0);
  REQUIRE(e < 1e-6 * double(n * n));
}

TEST_CASE("energy_local constant image is ~0") {
  const LevelSetField phi(oracle::disk_sdf(16, 16, 8, 8, 5.0));
  const ScalarGrid img(16, 16, 0.3);
  REQUIRE(energy_local(img, phi, small_params()) == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("energies match the naive double-loop oracles") {
  std::mt19937 rng(59);
  for (int trial = 0; trial < 50; ++trial) {
    const int w = 8 + int(rng() % 9), h = 8 + int(rng() % 9);
    const ScalarGrid img = oracle::smooth_noise_image(rng, w, h);
    const LevelSetField phi = levelset_from_mask(oracle::random_blob(rng, w, h));
    ModelParams p = small_params();
    p.patch_radius = 1 + int(rng() % 3);
    p.band_halfwidth = 2.0 + (rng() % 3);

    const double el = energy_local(img, phi, p);
    const double el_want = oracle::naive_energy_local(img, phi.grid, p);
    REQUIRE(el == Catch::Approx(el_want).epsilon(1e-10));

    BinaryMask prev = mask_boundary(oracle::random_blob(rng, w, h));
    if (prev.count() == 0) prev.set(w / 2, h / 2, true);
    const ScalarGrid bs = shape_penalty_field(prev, 2.0);
    const double es = energy_shape(phi, bs, p.heaviside_eps);
    REQUIRE(es == Catch::Approx(oracle::naive_energy_shape(phi.grid, bs, p.heaviside_eps)).epsilon(1e-10));

    const double er = energy_regularizer(phi, p.heaviside_eps);
    REQUIRE(er == Catch::Approx(oracle::naive_energy_regularizer(phi.grid, p.heaviside_eps)).epsilon(1e-10));

    REQUIRE(el >= 0.0);
    REQUIRE(es >= 0.0);
    REQUIRE(er >= 0.0);
  }
}

TEST_CASE("energy_local is invariant under a constant intensity shift") {
  std::mt19937 rng(61);
  const ScalarGrid img = oracle::smooth_noise_image(rng, 14, 14);
  const LevelSetField phi = levelset_from_mask(oracle::random_blob(rng, 14, 14));
  const ModelParams p = small_params();
  ScalarGrid shifted = img;
  for (auto& v : shifted.data) v += 0.25;
  const double a = energy_local(img, phi, p);
  const double b = energy_local(shifted, phi, p);
  REQUIRE(b == Catch::Approx(a).margin(1e-9));
}

TEST_CASE("energy_shape of a thin region tracking its own contour is ~0") {
  // 1-px-thick bar: every interior pixel is on the contour, so the dead zone
  // covers the interior; the arctan tail outside stays below 1e-3 per pixel
  // once eps is small.
  const int w = 32, h = 32;
  BinaryMask bar(w, h);
  for (int x = 8; x < 24; ++x) bar.set(x, 16, true);
  const LevelSetField phi = levelset_from_mask(bar);
  const ScalarGrid bs = shape_penalty_field(mask_boundary(bar), 1.0);
  const double e = energy_shape(phi, bs, 1e-3);
  REQUIRE(e < 1e-3 * double(w * h));
}

TEST_CASE("energy_regularizer approximates contour length") {
  const LevelSetField r10(oracle::disk_sdf(64, 64, 32, 32, 10.0));
  const double e10 = energy_regularizer(r10, 1.0);
  REQUIRE(e10 == Catch::Approx(2.0 * std::numbers::pi * 10.0).epsilon(0.20));

  REQUIRE(energy_regularizer(LevelSetField(ScalarGrid(32, 32, 2.0)), 1.0) == 0.0);

  const LevelSetField r20(oracle::disk_sdf(96, 96, 48, 48, 20.0));
  const double e20 = energy_regularizer(r20, 1.0);
  REQUIRE(e20 == Catch::Approx(2.0 * e10).epsilon(0.10));
}

TEST_CASE("energy_total composition and the coarsest-scale rule") {
  std::mt19937 rng(67);
  const ScalarGrid img = oracle::smooth_noise_image(rng, 16, 16);
  const LevelSetField phi = levelset_from_mask(oracle::random_blob(rng, 16, 16));
  ModelParams p = small_params();

  SECTION("all weights zero") {
    p.omega1 = p.omega2 = p.omega3 = 0.0;
    const BinaryMask prev = mask_boundary(oracle::random_blob(rng, 16, 16));
    REQUIRE(energy_total(img, phi, prev.count() ? &prev : nullptr, p) == 0.0);
  }
  SECTION("no previous contour drops the shape term") {
    const double e = energy_total(img, phi, nullptr, p);
    const double want = p.omega1 * energy_local(img, phi, p) +
                        p.omega3 * energy_regularizer(phi, p.heaviside_eps);
    REQUIRE(e == Catch::Approx(want).epsilon(1e-12));
  }
  SECTION("weighted sum of the component oracles") {
    BinaryMask prev = mask_boundary(oracle::random_blob(rng, 16, 16));
    if (prev.count() == 0) prev.set(8, 8, true);
    const ScalarGrid bs = shape_penalty_field(prev, p.r_s);
    const double want = p.omega1 * oracle::naive_energy_local(img, phi.grid, p) +
                        p.omega2 * oracle::naive_energy_shape(phi.grid, bs, p.heaviside_eps) +
                        p.omega3 * oracle::naive_energy_regularizer(phi.grid, p.heaviside_eps);
    REQUIRE(energy_total(img, phi, &prev, p) == Catch::Approx(want).epsilon(1e-10));
  }
}
