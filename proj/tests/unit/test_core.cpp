#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>

#include "adasgd/core/projection.hpp"
#include "adasgd/core/sgd.hpp"
#include "adasgd/core/step_schedule.hpp"
#include "adasgd/env/inventory.hpp"
#include "helpers.hpp"

using namespace adasgd;
using testing::vec;

TEST_CASE("step_size follows each schedule family") {
  CHECK(step_size({ScheduleFamily::InverseSqrt, 1.0, 1.0}, 4) == doctest::Approx(0.5));
  CHECK(step_size({ScheduleFamily::InverseT, 2.0, 1.0}, 2) == doctest::Approx(1.0));
  CHECK(step_size({ScheduleFamily::InverseT, 2.0, 10.0}, 100) == doctest::Approx(0.2));
  CHECK(step_size({ScheduleFamily::Constant, 0.3, 10.0}, 12345) == doctest::Approx(3.0));
}

TEST_CASE("step_size rejects k = 0 and invalid schedules") {
  CHECK_THROWS_AS(step_size({ScheduleFamily::InverseT, 1.0, 1.0}, 0), std::invalid_argument);
  CHECK_THROWS_AS(StepSchedule({ScheduleFamily::InverseT, -1.0, 1.0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(StepSchedule({ScheduleFamily::InverseT, 1.0, 0.0}).validate(), std::invalid_argument);
}

TEST_CASE("schedule families round-trip through their names") {
  for (auto f : {ScheduleFamily::InverseSqrt, ScheduleFamily::InverseT, ScheduleFamily::Constant}) {
    CHECK(parse_schedule_family(to_string(f)) == f);
  }
  CHECK_THROWS(parse_schedule_family("cosine"));
}

TEST_CASE("project clamps componentwise") {
  const BoxProjection box(vec({0.0}), vec({5.0}));
  CHECK(project(box, vec({7.0}))[0] == 5.0);
  CHECK(project(box, vec({3.0}))[0] == 3.0);
  const BoxProjection box2(vec({0.0, 1.0}), vec({5.0, 2.0}));
  const ThetaVector p = project(box2, vec({-1.0, 1.5}));
  CHECK(p[0] == 0.0);
  CHECK(p[1] == 1.5);
}

TEST_CASE("project rejects NaN and dimension mismatch") {
  const BoxProjection box(vec({0.0}), vec({5.0}));
  CHECK_THROWS_AS(box.project(vec({std::nan("")})), std::invalid_argument);
  CHECK_THROWS_AS(box.project(vec({1.0, 2.0})), std::invalid_argument);
  CHECK_THROWS_AS(BoxProjection(vec({1.0}), vec({0.0})), std::invalid_argument);
}

TEST_CASE("unbounded projection is the identity") {
  const auto box = BoxProjection::unbounded(2);
  const ThetaVector t = vec({-1e9, 3.5});
  CHECK(box.project(t) == t);
  CHECK(box.is_unbounded());
}

TEST_CASE("projection is idempotent and non-expansive") {
  const BoxProjection box(vec({-1.0, 0.0, 2.0}), vec({1.0, 4.0, 2.5}));
  Rng rng(11);
  std::normal_distribution<double> normal(0.0, 5.0);
  for (int i = 0; i < 1000; ++i) {
    const ThetaVector x = vec({normal(rng), normal(rng), normal(rng)});
    const ThetaVector y = vec({normal(rng), normal(rng), normal(rng)});
    const ThetaVector px = box.project(x);
    CHECK(box.contains(px));
    CHECK(box.project(px) == px);
    CHECK((px - box.project(y)).norm() <= (x - y).norm() + 1e-12);
  }
}

TEST_CASE("sgd_update examples") {
  CHECK(sgd_update(vec({1.0}), vec({2.0}), 0.5, nullptr)[0] == 0.0);
  CHECK(sgd_update(vec({1.0}), vec({0.0}), 0.5, nullptr)[0] == 1.0);
  const BoxProjection box(vec({0.0}), vec({1.0}));
  CHECK(sgd_update(vec({0.2}), vec({2.0}), 0.5, &box)[0] == 0.0);
}

TEST_CASE("derive_seed is deterministic and separates streams") {
  CHECK(derive_seed(1, 0) == derive_seed(1, 0));
  std::set<std::uint64_t> seen;
  for (std::uint64_t r = 0; r < 1000; ++r) seen.insert(derive_seed(1, r));
  CHECK(seen.size() == 1000);
  CHECK(derive_seed(1, 5) != derive_seed(2, 5));
}

TEST_CASE("normalize_checkpoints sorts, deduplicates and adds the horizon") {
  const std::vector<std::uint64_t> raw{5, 1, 5, 0, 200, 3};
  const auto out = normalize_checkpoints(raw, 100);
  CHECK(out == std::vector<std::uint64_t>{1, 3, 5, 100});
}

TEST_CASE("run_sgd with T = B performs exactly one update") {
  testing::ConstantEnv env{vec({1.0})};
  RunConfig cfg;
  cfg.horizon = 10;
  cfg.batch = 10;
  const auto rec = run_sgd(env, cfg, {ScheduleFamily::Constant, 0.5, 1.0}, vec({0.0}));
  REQUIRE(rec.size() == 2);
  CHECK(rec.sample_index == std::vector<std::uint64_t>{0, 10});
  CHECK(rec.theta[1][0] == doctest::Approx(-0.5));
}

TEST_CASE("run_sgd leaves theta fixed under a zero gradient") {
  testing::ConstantEnv env{vec({0.0, 0.0})};
  RunConfig cfg;
  cfg.horizon = 50;
  cfg.batch = 3;
  cfg.averaging = true;
  const ThetaVector theta0 = vec({1.5, -2.0});
  const auto rec = run_sgd(env, cfg, {ScheduleFamily::InverseSqrt, 1.0, 1.0}, theta0);
  for (std::size_t i = 0; i < rec.size(); ++i) {
    CHECK(rec.theta[i] == theta0);
    CHECK((rec.theta_bar[i] - theta0).norm() < 1e-15);
  }
}

TEST_CASE("run_sgd is deterministic for a fixed seed") {
  inventory::InventoryEnv a(inventory::InventoryParams{});
  inventory::InventoryEnv b(inventory::InventoryParams{});
  RunConfig cfg;
  cfg.horizon = 2000;
  cfg.batch = 1;
  cfg.seed = 99;
  cfg.averaging = true;
  cfg.projection = BoxProjection(vec({0.0}), vec({20.0}));
  const StepSchedule sched{ScheduleFamily::InverseT, 2.0, 1.0};
  const auto ra = run_sgd(a, cfg, sched, vec({10.0}));
  const auto rb = run_sgd(b, cfg, sched, vec({10.0}));
  REQUIRE(ra.size() == rb.size());
  for (std::size_t i = 0; i < ra.size(); ++i) {
    CHECK(ra.theta[i] == rb.theta[i]);
    CHECK(ra.theta_bar[i] == rb.theta_bar[i]);
  }
  cfg.seed = 100;
  inventory::InventoryEnv c(inventory::InventoryParams{});
  const auto rc = run_sgd(c, cfg, sched, vec({10.0}));
  CHECK(rc.theta.back() != ra.theta.back());
}

TEST_CASE("projected iterates and averages stay in the box") {
  testing::NoiseEnv env{2};
  RunConfig cfg;
  cfg.horizon = 5000;
  cfg.batch = 1;
  cfg.averaging = true;
  const BoxProjection box(vec({-0.5, 0.0}), vec({0.5, 0.1}));
  cfg.projection = box;
  const auto rec = run_sgd(env, cfg, {ScheduleFamily::Constant, 3.0, 1.0}, vec({0.0, 0.0}));
  for (std::size_t i = 0; i < rec.size(); ++i) {
    CHECK(box.contains(rec.theta[i]));
    CHECK(box.contains(rec.theta_bar[i]));
  }
}

TEST_CASE("incremental average matches a from-scratch recomputation") {
  testing::QuadraticMarkovEnv env;
  RunConfig cfg;
  cfg.horizon = 3000;
  cfg.batch = 2;
  cfg.averaging = true;
  const StepSchedule sched{ScheduleFamily::InverseSqrt, 0.7, 1.0};
  const auto rec = run_sgd(env, cfg, sched, vec({-4.0}));
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 1; k < rec.size(); ++k) {
    const double eta = step_size(sched, k);
    num += eta * rec.theta[k - 1][0];
    den += eta;
    const double expected = num / den;
    CHECK(std::abs(rec.theta_bar[k][0] - expected) <= 1e-10 * std::max(1.0, std::abs(expected)));
  }
}

TEST_CASE("one batch update equals the averaged single-sample gradients") {
  const std::uint64_t B = 7;
  testing::NoiseEnv env{3};
  RunConfig cfg;
  cfg.horizon = B;
  cfg.batch = B;
  cfg.seed = 5;
  const double eta = 0.25;
  const ThetaVector theta0 = vec({1.0, 2.0, 3.0});
  const auto rec = run_sgd(env, cfg, {ScheduleFamily::Constant, eta, 1.0}, theta0);

  Rng rng(cfg.seed);
  testing::NoiseEnv replay{3};
  replay.reset(theta0, rng);
  GradientSample sum = GradientSample::Zero(3);
  for (std::uint64_t i = 0; i < B; ++i) sum += replay.sample(theta0, rng);
  const ThetaVector expected = theta0 - eta * (sum / static_cast<double>(B));
  CHECK(rec.theta.back() == expected);
}

TEST_CASE("distinct iterates never exceed floor(T / B) + 1") {
  for (std::uint64_t B : {1u, 3u, 10u}) {
    testing::QuadraticMarkovEnv env;
    RunConfig cfg;
    cfg.horizon = 101;
    cfg.batch = B;
    const auto rec = run_sgd(env, cfg, {ScheduleFamily::InverseT, 1.0, 1.0}, vec({0.0}));
    std::set<double> distinct;
    for (const auto& t : rec.theta) distinct.insert(t[0]);
    CHECK(distinct.size() <= cfg.horizon / B + 1);
    CHECK(rec.size() == cfg.horizon / B + 1);
  }
}

TEST_CASE("checkpoints record the iterate after the given number of samples") {
  testing::ConstantEnv env{vec({1.0})};
  RunConfig cfg;
  cfg.horizon = 100;
  cfg.batch = 10;
  const std::vector<std::uint64_t> marks{5, 10, 25, 100};
  const auto rec = run_sgd(env, cfg, {ScheduleFamily::Constant, 1.0, 1.0}, vec({0.0}), marks);
  CHECK(rec.sample_index == marks);
  CHECK(rec.theta[0][0] == 0.0);
  CHECK(rec.theta[1][0] == -1.0);
  CHECK(rec.theta[2][0] == -2.0);
  CHECK(rec.theta[3][0] == -10.0);
}

TEST_CASE("sample-indexed schedules evaluate the step at k B") {
  testing::ConstantEnv env{vec({1.0})};
  RunConfig cfg;
  cfg.horizon = 40;
  cfg.batch = 4;
  cfg.step_by_samples = true;
  const StepSchedule sched{ScheduleFamily::InverseT, 1.0, 1.0};
  const auto rec = run_sgd(env, cfg, sched, vec({0.0}));
  double theta = 0.0;
  for (std::uint64_t k = 1; k <= 10; ++k) theta -= step_size(sched, 4 * k);
  CHECK(rec.theta.back()[0] == doctest::Approx(theta).epsilon(1e-14));
}

TEST_CASE("unprojected divergence freezes the trace") {
  testing::ExplodingEnv env;
  RunConfig cfg;
  cfg.horizon = 100;
  cfg.batch = 1;
  const std::vector<std::uint64_t> marks{1, 10, 50, 100};
  const auto rec = run_sgd(env, cfg, {ScheduleFamily::Constant, 1.0, 1.0}, vec({0.0}), marks);
  REQUIRE(rec.diverged());
  CHECK(*rec.divergence_sample < 10);
  CHECK(rec.size() == marks.size());
  for (const auto& t : rec.theta) CHECK(std::isfinite(t[0]));
  CHECK(rec.theta[1] == rec.theta[3]);
}

TEST_CASE("estimator domain errors count as divergence only without projection") {
  testing::DomainEnv env;
  RunConfig cfg;
  cfg.horizon = 10;
  cfg.batch = 1;
  const auto rec = run_sgd(env, cfg, {ScheduleFamily::Constant, 1.0, 1.0}, vec({2.5}));
  REQUIRE(rec.diverged());
  CHECK(*rec.divergence_sample == 4);

  cfg.projection = BoxProjection(vec({-10.0}), vec({10.0}));
  testing::DomainEnv env2;
  CHECK_THROWS_AS(run_sgd(env2, cfg, {ScheduleFamily::Constant, 1.0, 1.0}, vec({2.5})), std::domain_error);
}

TEST_CASE("run_sgd rejects inconsistent configurations") {
  testing::ConstantEnv env{vec({1.0})};
  RunConfig cfg;
  cfg.horizon = 5;
  cfg.batch = 10;
  CHECK_THROWS_AS(run_sgd(env, cfg, {}, vec({0.0})), std::invalid_argument);
  cfg.batch = 1;
  CHECK_THROWS_AS(run_sgd(env, cfg, {}, vec({0.0, 1.0})), std::invalid_argument);
}
