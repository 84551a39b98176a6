#include <doctest.h>

#include <cmath>

#include "adasgd/env/inventory.hpp"
#include "adasgd/oracles/inventory_oracle.hpp"
#include "helpers.hpp"

using namespace adasgd;
using namespace adasgd::inventory;

TEST_CASE("inventory transition without stock-out") {
  const auto next = inventory_transition({0.0, 0.0}, 10.0, InventoryParams{}, {0.0, 0.0});
  CHECK(next.demand == doctest::Approx(1.0));
  CHECK(next.derivative == 0.0);
}

TEST_CASE("inventory transition on the stock-out branch") {
  const auto next = inventory_transition({20.0, 0.0}, 10.0, InventoryParams{}, {0.0, 0.0});
  CHECK(next.demand == doctest::Approx(9.0));
  CHECK(next.derivative == doctest::Approx(0.8));
}

TEST_CASE("censoring at zero resets the derivative") {
  const auto next = inventory_transition({1.0, 0.5}, 10.0, InventoryParams{}, {0.0, -10.0});
  CHECK(next.demand == 0.0);
  CHECK(next.derivative == 0.0);
}

TEST_CASE("ties D + u = theta take the non-stock-out branch") {
  const auto next = inventory_transition({4.0, 0.25}, 5.0, InventoryParams{}, {1.0, 0.0});
  CHECK(next.demand == doctest::Approx(0.8 * 5.0 + 1.0));
  CHECK(next.derivative == doctest::Approx(0.8 * 0.25));
}

TEST_CASE("inventory gradient examples") {
  const InventoryParams p;
  CHECK(inventory_gradient({3.0, 0.0}, 5.0, p) == doctest::Approx(1.0));
  CHECK(inventory_gradient({7.0, 0.0}, 5.0, p) == doctest::Approx(-10.0));
  CHECK(inventory_gradient({7.0, 0.8}, 5.0, p) == doctest::Approx(-2.0));
}

TEST_CASE("inventory loss examples") {
  const InventoryParams p;
  CHECK(inventory_loss(3.0, 5.0, p) == doctest::Approx(2.0));
  CHECK(inventory_loss(5.0, 5.0, p) == 0.0);
  CHECK(inventory_loss(7.0, 5.0, p) == doctest::Approx(20.0));
}

TEST_CASE("parameter validation") {
  InventoryParams p;
  p.alpha = 1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.sigma = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.theta_max = -1.0;
  CHECK_THROWS_AS(InventoryEnv{p}, std::invalid_argument);
}

TEST_CASE("demand stays non-negative and the derivative stays in [0, alpha]") {
  for (double alpha : {0.3, 0.8, 0.95}) {
    InventoryParams p;
    p.alpha = alpha;
    NoiseSampler noise(p.sigma);
    Rng rng(3);
    InventoryState s;
    for (int t = 0; t < 100000; ++t) {
      const double theta = 2.0 + 8.0 * (t % 7) / 6.0;
      s = inventory_transition(s, theta, p, noise(rng));
      REQUIRE(s.demand >= 0.0);
      REQUIRE(s.derivative >= 0.0);
      REQUIRE(s.derivative <= alpha);
    }
  }
}

TEST_CASE("paths from different starts coincide after a joint visit to zero demand") {
  InventoryParams p;
  p.sigma = 3.0;
  NoiseSampler noise(p.sigma);
  Rng rng(17);
  InventoryState a{0.0, 0.0};
  InventoryState b{15.0, 0.7};
  bool coupled = false;
  for (int t = 0; t < 200000; ++t) {
    const auto n = noise(rng);
    a = inventory_transition(a, 6.0, p, n);
    b = inventory_transition(b, 6.0, p, n);
    if (coupled) {
      REQUIRE(a.demand == b.demand);
      REQUIRE(a.derivative == b.derivative);
    } else if (a.demand == 0.0 && b.demand == 0.0) {
      coupled = true;
    }
  }
  CHECK(coupled);
}

TEST_CASE("environment starts at the zero-demand atom and returns the estimator") {
  InventoryEnv env(InventoryParams{});
  Rng rng(1);
  env.reset(testing::vec({5.0}), rng);
  CHECK(env.state().demand == 0.0);
  CHECK(env.state().derivative == 0.0);
  const auto g = env.sample(testing::vec({5.0}), rng);
  CHECK(g[0] == doctest::Approx(inventory_gradient(env.state(), 5.0, env.params())));
}

TEST_CASE("stationary loss in the vanishing-noise limit") {
  InventoryParams p;
  p.sigma = 1e-4;
  const auto est = oracles::mc_stationary_loss(p, 6.0, 1000, 100000, 5);
  CHECK(est.mean == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("stationary loss matches the Gaussian AR(1) law when the cap never binds") {
  InventoryParams p;
  p.alpha = 0.5;
  p.m = 30.0;
  p.b = 1.0;
  p.h = 1.0;
  p.theta_max = 200.0;
  const double theta = 100.0;
  // Far from both the cap and zero: D ~ N(m, (1 + alpha^2) sigma^2 / (1 - alpha^2)).
  const double sd = std::sqrt((p.alpha * p.alpha + 1.0) * p.sigma * p.sigma / (1.0 - p.alpha * p.alpha));
  const double z = (theta - p.m) / sd;
  const double expected =
      (theta - p.m) * std::erf(z / std::sqrt(2.0)) + 2.0 * sd * std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
  const auto est = oracles::mc_stationary_loss(p, theta, 1000, 200000, 8);
  CHECK(std::abs(est.mean - expected) <= 4.0 * est.stderr_ + 1e-9);
}

TEST_CASE("stationary loss estimates from independent seeds agree") {
  const InventoryParams p;
  const auto a = oracles::mc_stationary_loss(p, 7.0, 1000, 200000, 1);
  const auto b = oracles::mc_stationary_loss(p, 7.0, 1000, 200000, 2);
  CHECK(std::abs(a.mean - b.mean) <= 4.0 * std::hypot(a.stderr_, b.stderr_));
  const auto c = oracles::mc_stationary_loss(p, 7.0, 1000, 200000, 1);
  CHECK(a.mean == c.mean);
}

TEST_CASE("stationary loss rejects undersized budgets") {
  CHECK_THROWS(oracles::mc_stationary_loss(InventoryParams{}, 5.0, 10, 100000, 1));
  CHECK_THROWS(oracles::mc_stationary_loss(InventoryParams{}, 5.0, 1000, 10, 1));
}

TEST_CASE("loss table interpolates linearly and clamps outside the grid") {
  const oracles::StationaryLossTable table(0.0, 0.5, {4.0, 2.0, 3.0});
  CHECK(table(0.25) == doctest::Approx(3.0));
  CHECK(table(0.75) == doctest::Approx(2.5));
  CHECK(table(-1.0) == doctest::Approx(4.0));
  CHECK(table(9.0) == doctest::Approx(3.0));
  CHECK(table.upper() == doctest::Approx(1.0));
}

TEST_CASE("loss table is deterministic across worker counts and its optimum is interior") {
  InventoryParams p;
  oracles::LossTableOptions o;
  o.step = 0.05;
  o.burn_in = 1000;
  o.samples = 100000;
  o.jobs = 1;
  const auto one = oracles::build_loss_table(p, o);
  o.jobs = 3;
  const auto three = oracles::build_loss_table(p, o);
  CHECK(one.values() == three.values());
  const auto opt = oracles::inventory_optimum(one);
  CHECK_FALSE(opt.on_boundary);
  CHECK(opt.point[0] > 4.0);
  CHECK(opt.point[0] < 9.0);
}
