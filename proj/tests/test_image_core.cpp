#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"

using namespace unfoldir;
using testutil::max_abs_diff;
using testutil::random_image;

TEST_CASE("mirror indexing reflects across edges") {
  CHECK(mirror_index(-1, 8) == 1);
  CHECK(mirror_index(8, 8) == 6);
  CHECK(mirror_index(-2, 8) == 2);
  CHECK(mirror_index(9, 8) == 5);
  CHECK(mirror_index(3, 8) == 3);
  CHECK(mirror_index(0, 8) == 0);
  CHECK(mirror_index(7, 8) == 7);
  CHECK(mirror_index(-5, 1) == 0);
  CHECK(mirror_index(3, 1) == 0);
}

TEST_CASE("plane shape checks throw") {
  Plane a(4, 5), b(5, 4);
  CHECK_THROWS_AS(require_same_shape(a, b, "test"), ShapeError);
  CHECK_NOTHROW(require_same_shape(a, Plane(4, 5), "test"));
}

TEST_CASE("image channel counts restricted to 1 or 3") {
  CHECK_THROWS_AS(Image(4, 4, 2), ShapeError);
  CHECK_THROWS_AS(Image(4, 4, 0), ShapeError);
  CHECK_NOTHROW(Image(4, 4, 1));
  CHECK_NOTHROW(Image(4, 4, 3));
  std::vector<Plane> two(2, Plane(3, 3));
  CHECK_THROWS_AS(Image::from_planes(std::move(two)), ShapeError);
}

TEST_CASE("initial decomposition follows the max-channel rule") {
  Image i(1, 1, 3);
  i.channel(0).at(0, 0) = 0.2;
  i.channel(1).at(0, 0) = 0.4;
  i.channel(2).at(0, 0) = 0.6;
  RetinexPair p = decompose_init(i, 1e-4);
  CHECK(p.illumination.at(0, 0) == Catch::Approx(0.6));
  CHECK(p.reflectance.channel(0).at(0, 0) == Catch::Approx(1.0 / 3.0));
  CHECK(p.reflectance.channel(1).at(0, 0) == Catch::Approx(2.0 / 3.0));
  CHECK(p.reflectance.channel(2).at(0, 0) == Catch::Approx(1.0));
}

TEST_CASE("initial decomposition floors dark pixels") {
  Image zero(3, 3, 3, 0.0);
  RetinexPair p = decompose_init(zero, 1e-4);
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 3; ++x) {
      CHECK(p.illumination.at(y, x) == 1e-4);
      for (int c = 0; c < 3; ++c) CHECK(p.reflectance.channel(c).at(y, x) == 0.0);
    }
}

TEST_CASE("initial decomposition reconstructs the input") {
  std::mt19937 g(101);
  Image i = random_image(8, 8, 3, g, 0.01, 1.0);
  RetinexPair p = decompose_init(i, 1e-4);
  Image back = hadamard(p.reflectance, p.illumination);
  CHECK(max_abs_diff(back, i) <= 1e-12);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) {
      CHECK(p.illumination.at(y, x) >= 1e-4);
      CHECK(p.illumination.at(y, x) <= 1.0);
      for (int c = 0; c < 3; ++c) {
        CHECK(p.reflectance.channel(c).at(y, x) >= 0.0);
        CHECK(p.reflectance.channel(c).at(y, x) <= 1e4);
      }
    }
}

TEST_CASE("initial decomposition validates the floor") {
  Image i(2, 2, 3, 0.5);
  CHECK_THROWS_AS(decompose_init(i, 0.0), ConfigError);
  CHECK_THROWS_AS(decompose_init(i, -1.0), ConfigError);
  CHECK_THROWS_AS(decompose_init(i, 0.1), ConfigError);
  CHECK_NOTHROW(decompose_init(i, 0.05));
}

TEST_CASE("hadamard product and broadcast") {
  std::mt19937 g(102);
  Image ones(4, 4, 3, 1.0);
  Image b = random_image(4, 4, 3, g);
  CHECK(max_abs_diff(hadamard(ones, b), b) == 0.0);

  Image half(2, 2, 3, 0.5);
  Image prod = hadamard(half, half);
  CHECK(prod.channel(1).at(1, 1) == 0.25);

  Image a3 = random_image(4, 4, 3, g);
  Image b1 = random_image(4, 4, 1, g);
  Image ab = hadamard(a3, b1);
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < 4; ++y)
      for (int x = 0; x < 4; ++x)
        CHECK(ab.channel(c).at(y, x) ==
              a3.channel(c).at(y, x) * b1.channel(0).at(y, x));

  // commutative for same-shape inputs
  Image c3 = random_image(4, 4, 3, g);
  CHECK(max_abs_diff(hadamard(a3, c3), hadamard(c3, a3)) == 0.0);

  CHECK_THROWS_AS(hadamard(a3, random_image(4, 5, 3, g)), ShapeError);
  CHECK_THROWS_AS(hadamard(b1, a3), ShapeError);
}

TEST_CASE("clamp to unit range is exact and idempotent") {
  Plane p(1, 3);
  p.at(0, 0) = 1.3;
  p.at(0, 1) = -0.2;
  p.at(0, 2) = 0.7;
  Plane c = clamp_unit(p);
  CHECK(c.at(0, 0) == 1.0);
  CHECK(c.at(0, 1) == 0.0);
  CHECK(c.at(0, 2) == 0.7);
  CHECK(max_abs_diff(clamp_unit(c), c) == 0.0);
}
