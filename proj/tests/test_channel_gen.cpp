#include <doctest.h>

#include <cmath>

#include "cran/channel_gen.hpp"

using namespace cran;

// Frozen values from tests/oracles/reference_values.py, which implements
// splitmix64 and mt19937_64 independently.
TEST_CASE("derived seeds") {
  CHECK(derive_seed(0, 0) == 12035550249420947055ULL);
  CHECK(derive_seed(7, 3) == 16753576447339095367ULL);
  CHECK(derive_seed(~0ULL, 12345) == 16306971950133348762ULL);
  CHECK(derive_seed(7, 3) != derive_seed(3, 7));
}

TEST_CASE("engine is the standard 64-bit Mersenne twister") {
  std::mt19937_64 e;
  e.discard(9999);
  CHECK(e() == 9981545732273789042ULL);
}

TEST_CASE("uniform and gaussian draws are bit-reproducible") {
  Rng a(42);
  CHECK(a.uniform() == 0.75515553295453897);
  CHECK(a.uniform() == 0.63903139385469743);
  CHECK(a.uniform() == 0.7521452007480266);
  Rng b(42);
  const Complex g = b.complex_gaussian();
  CHECK(g.real() == doctest::Approx(-0.76167742478070677).epsilon(1e-14));
  CHECK(g.imag() == doctest::Approx(-0.90938418668435983).epsilon(1e-14));
}

TEST_CASE("first RRH position") {
  const Topology t = generate_topology(GenConfig{}, 3, 2, derive_seed(11, 0));
  CHECK(t.rrh_pos[0].x == doctest::Approx(37.788826523069417).epsilon(1e-13));
  CHECK(t.rrh_pos[0].y == doctest::Approx(483.01054018558636).epsilon(1e-13));
}

TEST_CASE("complex gaussian has unit power and zero mean") {
  Rng rng(3);
  const int n = 200000;
  double power = 0.0;
  Complex mean = 0.0;
  for (int i = 0; i < n; ++i) {
    const Complex g = rng.complex_gaussian();
    power += std::norm(g);
    mean += g;
  }
  CHECK(power / n == doctest::Approx(1.0).epsilon(0.01));
  CHECK(std::abs(mean / double(n)) < 0.01);
}

TEST_CASE("users are area-uniform on the disk") {
  const Topology t = generate_topology(GenConfig{}, 1, 10000, 99);
  double mean_r = 0.0;
  for (const Point& p : t.user_pos) {
    const double r = std::hypot(p.x, p.y);
    CHECK(r <= 500.0);
    mean_r += r;
  }
  mean_r /= 10000;
  CHECK(std::abs(mean_r - 2.0 / 3.0 * 500.0) < 5.0);
}

TEST_CASE("ring layout spaces RRHs evenly") {
  GenConfig g;
  g.rrh_layout = RrhLayout::ring;
  g.ring_radius_frac = 0.4;
  const Topology t = generate_topology(g, 4, 3, 5);
  for (int n = 0; n < 4; ++n) {
    CHECK(std::hypot(t.rrh_pos[n].x, t.rrh_pos[n].y) == doctest::Approx(200.0));
    const double theta = std::atan2(t.rrh_pos[n].y, t.rrh_pos[n].x);
    CHECK(std::remainder(theta - n * M_PI / 2, 2 * M_PI) == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("same seed gives the same channels") {
  GenConfig g;
  const Topology t1 = generate_topology(g, 3, 6, 17);
  const Topology t2 = generate_topology(g, 3, 6, 17);
  CHECK(generate_channels(t1, g, 2, 18) == generate_channels(t2, g, 2, 18));
  CHECK_FALSE(generate_channels(t1, g, 2, 18) == generate_channels(t1, g, 2, 19));
}

TEST_CASE("path loss model") {
  GenConfig g;
  CHECK(path_loss_db(g, 1.0) == doctest::Approx(30.6));
  CHECK(path_loss_db(g, 100.0) == doctest::Approx(30.6 + 73.4));
  CHECK(path_loss_db(g, 0.0) == path_loss_db(g, 1.0));
  CHECK(path_loss_db(g, 0.2) == path_loss_db(g, 1.0));
}

TEST_CASE("mean channel gain follows path loss") {
  GenConfig g;
  Topology t;
  t.radius_m = 500.0;
  t.rrh_pos = {{0.0, 0.0}};
  t.user_pos.assign(4000, Point{100.0, 0.0});
  const ChannelState ch = generate_channels(t, g, 2, 8);
  double mean = 0.0;
  for (int k = 0; k < 4000; ++k) mean += ch(k, 0).squaredNorm() / 2.0;
  mean /= 4000;
  CHECK(to_db(mean) == doctest::Approx(-104.0).epsilon(0.003));
}

TEST_CASE("noise power") {
  // -169 dBm/Hz + 70 dB + 7 dB = -92 dBm
  CHECK(noise_power(-169.0, 7.0, 10e6) == doctest::Approx(std::pow(10.0, -12.2)).epsilon(1e-12));
  CHECK_THROWS_AS(noise_power(-169.0, 7.0, 0.0), std::invalid_argument);
}

TEST_CASE("generator config validation") {
  GenConfig g;
  g.radius_m = 0.0;
  CHECK_THROWS_WITH_AS(g.validate(), doctest::Contains("radius_m"), std::invalid_argument);
  g = GenConfig{};
  g.ring_radius_frac = 1.5;
  CHECK_THROWS_WITH_AS(g.validate(), doctest::Contains("ring_radius_frac"), std::invalid_argument);
}
