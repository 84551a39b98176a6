#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "adasgd/oracles/cache.hpp"
#include "adasgd/oracles/optimize.hpp"
#include "adasgd/oracles/statistics.hpp"
#include "helpers.hpp"

using namespace adasgd;
using namespace adasgd::oracles;

namespace {

LossCurve synthetic_curve(const std::function<double(double)>& gap) {
  LossCurve c;
  for (int k = 0; k <= 64; ++k) {
    const auto t = static_cast<std::uint64_t>(std::llround(std::pow(10.0, 2.0 + 2.0 * k / 64.0)));
    if (!c.sample_counts.empty() && c.sample_counts.back() == t) continue;
    c.sample_counts.push_back(t);
    c.mean_gap.push_back(gap(static_cast<double>(t)));
    c.stderr_.push_back(0.0);
  }
  return c;
}

}  // namespace

TEST_CASE("rate fit recovers exact power laws") {
  auto fit = fit_rate(synthetic_curve([](double t) { return 7.0 / t; }), 100, 10000);
  CHECK(fit.slope == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::exp(fit.intercept) == doctest::Approx(7.0).epsilon(1e-9));
  fit = fit_rate(synthetic_curve([](double t) { return 3.0 / std::sqrt(t); }), 100, 10000);
  CHECK(fit.slope == doctest::Approx(-0.5).epsilon(1e-9));
}

TEST_CASE("rate fit is robust to a bounded log-periodic perturbation") {
  const auto fit = fit_rate(synthetic_curve([](double t) { return 5.0 / t * (1.0 + 0.1 * std::sin(std::log(t))); }),
                            100, 10000);
  CHECK(fit.slope >= -1.1);
  CHECK(fit.slope <= -0.9);
}

TEST_CASE("rate fit excludes non-positive gaps and refuses sparse windows") {
  auto curve = synthetic_curve([](double t) { return 1.0 / t; });
  curve.mean_gap[10] = -1e-3;
  curve.mean_gap[20] = 0.0;
  const auto fit = fit_rate(curve, 100, 10000);
  CHECK(fit.excluded == 2);
  CHECK(fit.points == static_cast<int>(curve.sample_counts.size()) - 2);
  CHECK(fit.slope == doctest::Approx(-1.0).epsilon(1e-9));

  for (std::size_t i = 0; i < curve.mean_gap.size(); i += 3) curve.mean_gap[i] = INFINITY;
  CHECK_THROWS_AS(fit_rate(curve, 100, 10000), std::invalid_argument);
  CHECK_THROWS_AS(fit_rate(synthetic_curve([](double t) { return 1.0 / t; }), 100, 110), std::invalid_argument);
}

TEST_CASE("default fit window covers the last two decades above 100 samples") {
  CHECK(default_fit_window(10000) == std::pair<double, double>{100.0, 10000.0});
  CHECK(default_fit_window(100000) == std::pair<double, double>{1000.0, 100000.0});
  CHECK(default_fit_window(5000).first == 100.0);
}

TEST_CASE("batch means on i.i.d. data") {
  Rng rng(1);
  std::normal_distribution<double> normal(2.0, 3.0);
  std::vector<double> xs(100000);
  for (auto& x : xs) x = normal(rng);
  const auto est = batch_means(xs);
  CHECK(std::abs(est.mean - 2.0) < 4 * est.stderr_);
  CHECK(est.stderr_ == doctest::Approx(3.0 / std::sqrt(100000.0)).epsilon(0.3));
}

TEST_CASE("batch means widens the error bar for autocorrelated data") {
  Rng rng(2);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> xs(200000);
  double x = 0.0;
  for (auto& v : xs) {
    x = 0.9 * x + normal(rng);
    v = x;
  }
  const auto est = batch_means(xs);
  // Long-run variance of AR(1) is sigma^2 / (1 - phi)^2 = 100.
  CHECK(est.stderr_ == doctest::Approx(10.0 / std::sqrt(200000.0)).epsilon(0.3));
}

TEST_CASE("weighted batch means form a ratio estimator") {
  BatchMeans bm(4);
  bm.add(0, 2.0, 1.0);
  bm.add(1, 4.0, 3.0);
  bm.add(2, 1.0, 0.0);
  bm.add(3, 6.0, 2.0);
  CHECK(bm.total_weight() == 6.0);
  CHECK(bm.estimate().mean == doctest::Approx((2.0 + 12.0 + 12.0) / 6.0));
  CHECK_THROWS(bm.add(4, 1.0));
  CHECK_THROWS(BatchMeans(1));
  CHECK(standardized_difference({1.0, 0.3}, {1.5, 0.4}) == doctest::Approx(1.0));
}

TEST_CASE("batch_of splits indices into equal consecutive blocks") {
  CHECK(batch_of(0, 100, 50) == 0);
  CHECK(batch_of(1, 100, 50) == 0);
  CHECK(batch_of(2, 100, 50) == 1);
  CHECK(batch_of(99, 100, 50) == 49);
}

TEST_CASE("grid optimum of a 1-D quadratic") {
  const auto opt = grid_optimum([](double t) { return (t - 3.0) * (t - 3.0); }, 0.0, 10.0, 0.1);
  CHECK(opt.point[0] == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(std::abs(opt.value) < 1e-10);
  CHECK_FALSE(opt.on_boundary);
}

TEST_CASE("grid optimum flags boundary minimizers") {
  const auto opt = grid_optimum([](double t) { return t; }, 0.0, 1.0, 0.05);
  CHECK(opt.on_boundary);
  CHECK_FALSE(opt.diagnostic.empty());
  CHECK(opt.point[0] == doctest::Approx(0.0));
}

TEST_CASE("grid optimum is insensitive to halving the coarse step") {
  const auto f = [](double t) { return std::cosh(t - 2.345) + 0.1 * std::sin(3 * t); };
  const auto a = grid_optimum(f, 0.0, 5.0, 0.1);
  const auto b = grid_optimum(f, 0.0, 5.0, 0.05);
  CHECK(std::abs(a.point[0] - b.point[0]) <= 1e-5);
}

TEST_CASE("grid optimum in two dimensions treats throwing regions as infinite") {
  const BoxProjection box(testing::vec({0.0, 0.0}), testing::vec({4.0, 4.0}));
  const ScalarLoss loss = [](const Eigen::VectorXd& x) {
    if (x[0] + x[1] < 1.0) throw std::domain_error("outside");
    return (x[0] - 1.7) * (x[0] - 1.7) + 2.0 * (x[1] - 2.2) * (x[1] - 2.2) + 0.5 * (x[0] - 1.7) * (x[1] - 2.2);
  };
  const auto a = grid_optimum(loss, box, 0.1);
  CHECK(a.point[0] == doctest::Approx(1.7).epsilon(1e-5));
  CHECK(a.point[1] == doctest::Approx(2.2).epsilon(1e-5));
  CHECK_FALSE(a.on_boundary);
  const auto b = grid_optimum(loss, box, 0.05);
  CHECK((a.point - b.point).norm() <= 1e-5);
}

TEST_CASE("FNV-1a reference values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("oracle cache stores, reloads and checks keys") {
  const auto root = std::filesystem::temp_directory_path() / "adasgd-cache-test";
  std::filesystem::remove_all(root);
  const OracleCache cache(root);
  const nlohmann::json key{{"alpha", 0.8}, {"step", 0.01}};
  CHECK_FALSE(cache.load("inventory", key).has_value());
  cache.store("inventory", key, {{"theta_star", 6.12}});
  const auto hit = cache.load("inventory", key);
  REQUIRE(hit.has_value());
  CHECK((*hit)["theta_star"].get<double>() == 6.12);
  CHECK(cache.path_for("inventory", key).parent_path().filename() == "oracle-cache");
  CHECK_FALSE(cache.load("inventory", {{"alpha", 0.9}, {"step", 0.01}}).has_value());
  CHECK_FALSE(cache.load("queue", key).has_value());
  std::filesystem::remove_all(root);
}
