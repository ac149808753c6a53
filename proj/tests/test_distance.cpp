#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "msac/distance_transform.hpp"
#include "oracles.hpp"

using namespace msac;

TEST_CASE("distance_transform single boundary pixel, 3-4-5 triangle") {
  BinaryMask b(8, 8);
  b.set(0, 0, true);
  const ScalarGrid d = distance_transform(b);
  REQUIRE(d.at(0, 0) == 0.0);
  REQUIRE(d.at(3, 4) == Catch::Approx(5.0));
  REQUIRE(d.at(4, 3) == Catch::Approx(5.0));
}

TEST_CASE("distance_transform all-boundary is all zeros") {
  BinaryMask b(5, 6, true);
  const ScalarGrid d = distance_transform(b);
  for (double v : d.data) REQUIRE(v == 0.0);
}

TEST_CASE("distance_transform empty boundary throws") {
  REQUIRE_THROWS_AS(distance_transform(BinaryMask(4, 4)), std::invalid_argument);
}

TEST_CASE("distance_transform equals all-pairs oracle exactly on random sets") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int w = 4 + int(rng() % 29), h = 4 + int(rng() % 29);
    BinaryMask set = oracle::random_mask(rng, w, h, 0.07);
    if (set.count() == 0) set.set(int(rng() % w), int(rng() % h), true);
    const auto got = squared_distance_to_set(set);
    const auto want = oracle::brute_squared_distance(set);
    REQUIRE(got == want);
  }
}
