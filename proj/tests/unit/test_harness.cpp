#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "adasgd/harness/config.hpp"
#include "adasgd/harness/experiment.hpp"
#include "adasgd/harness/report.hpp"

using namespace adasgd;
using namespace adasgd::harness;
using nlohmann::json;

namespace {

std::size_t count(const std::string& haystack, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string::npos; pos = haystack.find(needle, pos + 1)) ++n;
  return n;
}

std::string attribute(const std::string& svg, const std::string& name, std::size_t from = 0) {
  const auto key = name + "=\"";
  const auto start = svg.find(key, from);
  REQUIRE(start != std::string::npos);
  const auto end = svg.find('"', start + key.size());
  return svg.substr(start + key.size(), end - start - key.size());
}

ExperimentConfig small_queue() {
  ExperimentConfig cfg = find_preset("queue-mm1").experiments.front();
  cfg.id = "small-queue";
  cfg.batches = {1, 10};
  cfg.horizon = 2000;
  cfg.replications = 4;
  return cfg;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(ADASGD_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("every preset validates and round-trips through JSON") {
  REQUIRE_FALSE(presets().empty());
  for (const auto& preset : presets()) {
    CAPTURE(preset.name);
    CHECK_FALSE(preset.description.empty());
    for (const auto& cfg : preset.experiments) CHECK_NOTHROW(cfg.validate());
    const auto doc = to_document(preset.experiments);
    const auto back = parse_experiments(json::parse(doc.dump()));
    CHECK(back == preset.experiments);
  }
  CHECK_THROWS_AS(find_preset("no-such-preset"), ConfigError);
}

TEST_CASE("configuration parsing rejects malformed documents") {
  json doc = small_queue();
  doc["unexpected"] = 1;
  CHECK_THROWS_AS(parse_experiments(doc), ConfigError);

  ExperimentConfig cfg = small_queue();
  cfg.batches = {1, 1};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = small_queue();
  cfg.batches = {5000};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = small_queue();
  cfg.eta0 = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = small_queue();
  cfg.replications = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = small_queue();
  cfg.env = EnvKind::Rl;
  cfg.rl.gamma = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  CHECK_THROWS_AS(load_experiments("/nonexistent/config.json"), ConfigError);
  CHECK_THROWS_AS(parse_env_kind("bandit"), std::exception);
}

TEST_CASE("logarithmic checkpoints are strictly increasing and end at the horizon") {
  for (std::uint64_t horizon : {1ULL, 7ULL, 100ULL, 10000ULL, 12345ULL}) {
    const auto c = log_checkpoints(horizon, 32);
    REQUIRE_FALSE(c.empty());
    CHECK(c.front() == 1);
    CHECK(c.back() == horizon);
    for (std::size_t i = 1; i < c.size(); ++i) CHECK(c[i] > c[i - 1]);
  }
  CHECK(log_checkpoints(1000, 1) == std::vector<std::uint64_t>{1, 10, 100, 1000});
  CHECK_THROWS(log_checkpoints(0, 32));
  CHECK_THROWS(log_checkpoints(100, 0));
}

TEST_CASE("experiment output is deterministic across worker counts") {
  const auto cfg = small_queue();
  RunOptions one;
  one.jobs = 1;
  RunOptions three;
  three.jobs = 3;
  const auto a = run_experiment(cfg, one);
  const auto b = run_experiment(cfg, three);
  const auto csv = to_csv(a);
  CHECK(csv == to_csv(b));
  CHECK(render_svg(a) == render_svg(b));

  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == kCsvHeader);
  std::uint64_t prev_b = 0;
  std::uint64_t prev_t = 0;
  int rows = 0;
  while (std::getline(in, line)) {
    std::stringstream fields(line);
    std::string id, env, bs, ts;
    std::getline(fields, id, ',');
    std::getline(fields, env, ',');
    std::getline(fields, bs, ',');
    std::getline(fields, ts, ',');
    CHECK(id == "small-queue");
    CHECK(env == "queue");
    const auto bb = std::stoull(bs);
    const auto tt = std::stoull(ts);
    CHECK((bb > prev_b || (bb == prev_b && tt > prev_t)));
    prev_b = bb;
    prev_t = tt;
    ++rows;
  }
  CHECK(rows == static_cast<int>(2 * a.checkpoints.size()));
}

TEST_CASE("SVG with one curve") {
  const SvgSeries s{"B=1", {1, 10, 100, 1000}, {1.0, 0.1, 0.01, 0.001}};
  const auto svg = render_svg({s}, {}, -1.0, "demo");
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(count(svg, "<svg") == 1);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(count(svg, "<polyline") == 1);
  CHECK(count(svg, "class=\"reference\"") == 1);
  CHECK(count(svg, "class=\"legend-entry\"") == 1);
  CHECK(count(svg, "<g") == count(svg, "</g>"));
}

TEST_CASE("SVG with three curves and a data round trip") {
  std::vector<SvgSeries> series;
  for (int k = 0; k < 3; ++k) {
    SvgSeries s{"B=" + std::to_string(k), {}, {}};
    for (std::uint64_t t = 1; t <= 10000; t *= 10) {
      s.samples.push_back(t);
      s.gaps.push_back((k + 1) * 0.123456789 / static_cast<double>(t));
    }
    series.push_back(s);
  }
  series[2].gaps[1] = 0.0;
  const auto svg = render_svg(series, {}, -0.5);
  CHECK(count(svg, "<polyline") == 3);
  CHECK(count(svg, "class=\"legend-entry\"") == 3);

  std::size_t pos = 0;
  for (int k = 0; k < 3; ++k) {
    pos = svg.find("<polyline", pos + 1);
    std::istringstream ts(attribute(svg, "data-samples", pos));
    std::istringstream gs(attribute(svg, "data-gaps", pos));
    std::vector<std::uint64_t> t;
    std::vector<double> g;
    for (std::uint64_t v; ts >> v;) t.push_back(v);
    for (double v; gs >> v;) g.push_back(v);
    std::vector<std::uint64_t> want_t;
    std::vector<double> want_g;
    for (std::size_t i = 0; i < series[k].samples.size(); ++i) {
      if (series[k].gaps[i] <= 0.0) continue;
      want_t.push_back(series[k].samples[i]);
      want_g.push_back(std::stod(format_number(series[k].gaps[i])));
    }
    CHECK(t == want_t);
    CHECK(g == want_g);
  }
}

TEST_CASE("SVG rejects input without drawable data") {
  CHECK_THROWS_AS(render_svg({}, {}, -1.0), std::invalid_argument);
  const SvgSeries zero{"zero", {1, 10}, {0.0, 0.0}};
  CHECK_THROWS_AS(render_svg({zero}, {}, -1.0), std::invalid_argument);
}

TEST_CASE("outputs are written under the requested directory") {
  const auto dir = std::filesystem::temp_directory_path() / "adasgd-report-test";
  std::filesystem::remove_all(dir);
  const auto result = run_experiment(small_queue(), RunOptions{});
  const auto files = write_outputs(result, dir);
  CHECK(files.csv == dir / "small-queue.csv");
  CHECK(std::filesystem::exists(files.csv));
  CHECK(std::filesystem::exists(files.svg));
  std::ifstream in(files.csv);
  std::stringstream buffer;
  buffer << in.rdbuf();
  CHECK(buffer.str() == to_csv(result));
  std::filesystem::remove_all(dir);
}

TEST_CASE("command line exit codes") {
  CHECK(run_cli("list-presets") == 0);
  CHECK(run_cli("--no-such-flag") == 2);
  CHECK(run_cli("run --config /nonexistent/config.json") == 2);
  CHECK(run_cli("run --preset no-such-preset") == 2);
}
