// SPDX-License-Identifier: Apache-2.0

#include "rhs/channel.hpp"

#include <doctest.h>

#include <cmath>

using namespace rhs;
using namespace rhs::channel;

TEST_SUITE("channel") {

TEST_CASE("dbm_to_watts") {
  CHECK(dbm_to_watts(30.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(dbm_to_watts(0.0) == doctest::Approx(1e-3).epsilon(1e-15));
  // 10^((-85 - 30) / 10) = 10^-11.5
  CHECK(dbm_to_watts(-85.0) == doctest::Approx(3.1622776601683795e-12).epsilon(1e-12));
  CHECK(watts_to_dbm(dbm_to_watts(17.25)) == doctest::Approx(17.25).epsilon(1e-14));
}

TEST_CASE("path_loss_db") {
  PathLossModel defaults;
  CHECK(path_loss_db(1.0, defaults, 0.0) == doctest::Approx(61.4));
  // 61.4 + 20 log10(40) = 61.4 + 32.0412
  CHECK(path_loss_db(40.0, defaults, 0.0) == doctest::Approx(93.44119982655925).epsilon(1e-12));
  PathLossModel unit{0.0, 1.0, 0.0};
  CHECK(path_loss_db(10.0, unit, 2.5) == doctest::Approx(12.5));

  double prev = path_loss_db(0.5, defaults, 0.0);
  for (double r = 1.0; r < 200.0; r *= 1.3) {
    const double pl = path_loss_db(r, defaults, 0.0);
    CHECK(pl > prev);
    prev = pl;
  }
  CHECK_THROWS_AS(path_loss_db(0.0, defaults, 0.0), DomainError);
  CHECK_THROWS_AS(path_loss_db(-1.0, defaults, 0.0), DomainError);
}

TEST_CASE("draw_channel_matrix variance") {
  Rng rng(7);
  for (double pl : {0.0, 20.0}) {
    const CMat h = draw_channel_matrix(1000, 1000, pl, rng);
    const double mean_power = h.cwiseAbs2().mean();
    const double expected = std::pow(10.0, -pl / 10.0);
    CHECK(mean_power / expected == doctest::Approx(1.0).epsilon(0.01));
    // The real and imaginary parts carry half of the variance each.
    CHECK(h.real().array().square().mean() / expected == doctest::Approx(0.5).epsilon(0.02));
    CHECK(std::abs(h.mean()) < 0.01 * std::sqrt(expected));
  }
}

TEST_CASE("draw_channel_matrix determinism") {
  Rng a(99), b(99);
  CHECK(draw_channel_matrix(5, 3, 10.0, a) == draw_channel_matrix(5, 3, 10.0, b));
}

TEST_CASE("distance_factor") {
  CHECK(distance_factor(10.0, 10.0, 2.0) == doctest::Approx(100.0));
  CHECK(distance_factor(3.0, 7.0, 0.0) == 1.0);
  for (double kappa : {1.0, 2.0, 3.5})
    CHECK(distance_factor(4.0, 9.0, kappa) == doctest::Approx(distance_factor(9.0, 4.0, kappa)));
}

TEST_CASE("build_network distance factors") {
  NetworkLayout layout;
  layout.rhs_positions = {{10.0, 0.0}};
  layout.ue_positions = {{20.0, 0.0}};
  Dims dims{1, 1, 4, 2};
  Rng rng(1);
  auto set = build_network(layout, PathLossModel{}, dims, -85.0, rng);
  CHECK(set.d_factors(0, 0) == doctest::Approx(100.0));

  layout.path_loss_exponent = 0.0;
  layout.rhs_positions = {{10.0, 0.0}, {3.0, 4.0}};
  layout.ue_positions = {{20.0, 0.0}, {30.0, 1.0}};
  Dims dims2{2, 2, 4, 2};
  set = build_network(layout, PathLossModel{}, dims2, -85.0, rng);
  CHECK((set.d_factors.array() == 1.0).all());
}

TEST_CASE("build_network shapes and determinism") {
  NetworkLayout layout;
  layout.rhs_positions = NetworkLayout::default_rhs_positions(4);
  Dims dims{4, 2, 16, 32};
  Rng a(5), b(5);
  const auto x = build_network(layout, PathLossModel{}, dims, -85.0, a);
  const auto y = build_network(layout, PathLossModel{}, dims, -85.0, b);
  REQUIRE(x.h_ap_rhs.size() == 4);
  for (std::size_t s = 0; s < 4; ++s) {
    CHECK(x.h_ap_rhs[s].rows() == 16);
    CHECK(x.h_ap_rhs[s].cols() == 32);
    REQUIRE(x.g_rhs_ue[s].size() == 2);
    for (const auto &g : x.g_rhs_ue[s])
      CHECK(g.size() == 16);
    CHECK(x.h_ap_rhs[s] == y.h_ap_rhs[s]);
    for (std::size_t k = 0; k < 2; ++k)
      CHECK(x.g_rhs_ue[s][k] == y.g_rhs_ue[s][k]);
  }
  CHECK(x.d_factors == y.d_factors);
  CHECK((x.d_factors.array() > 0.0).all());
  CHECK(x.noise_power == doctest::Approx(dbm_to_watts(-85.0)));
  CHECK(x.ue_positions == y.ue_positions);
  CHECK_NOTHROW(x.validate());
}

TEST_CASE("drawn UEs lie in the UE disk") {
  NetworkLayout layout;
  layout.rhs_positions = NetworkLayout::default_rhs_positions(2);
  Dims dims{2, 50, 2, 2};
  Rng rng(11);
  const auto set = build_network(layout, PathLossModel{}, dims, -85.0, rng);
  REQUIRE(set.ue_positions.size() == 50);
  for (const auto &u : set.ue_positions)
    CHECK(distance(u, layout.ue_center) <= layout.ue_radius);
}

TEST_CASE("default surfaces avoid the AP") {
  for (std::size_t n = 1; n <= 8; ++n)
    for (const auto &q : NetworkLayout::default_rhs_positions(n)) {
      CHECK(distance(q, {0.0, 0.0}) > 1.0);
      CHECK(distance(q, {20.0, 0.0}) == doctest::Approx(20.0));
    }
}

TEST_CASE("invalid inputs") {
  NetworkLayout layout;
  Rng rng(1);
  CHECK_THROWS_AS(build_network(layout, PathLossModel{}, Dims{1, 1, 4, 2}, -85.0, rng), DomainError);
  layout.rhs_positions = {{0.0, 0.0}};
  layout.ue_positions = {{5.0, 0.0}};
  CHECK_THROWS_AS(build_network(layout, PathLossModel{}, Dims{1, 1, 4, 2}, -85.0, rng), DomainError);
  layout.rhs_positions = {{1.0, 0.0}};
  layout.ue_radius = 0.0;
  CHECK_THROWS_AS(build_network(layout, PathLossModel{}, Dims{1, 1, 4, 2}, -85.0, rng), DomainError);
  layout.ue_radius = 1.0;
  CHECK_THROWS_AS(build_network(layout, PathLossModel{}, Dims{1, 0, 4, 2}, -85.0, rng), DomainError);
}

} // TEST_SUITE
