#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <doctest.h>
#include <json.hpp>

#include "fastdiff/error.hpp"
#include "fastdiff/lab.hpp"

using namespace fastdiff;
using namespace fastdiff::lab;

TEST_CASE("config parsing") {
  const ExperimentConfig c = config_from_json(R"({"schema_version": 1, "model": {"m": 0.7}, "grid": {"count": 400}})");
  CHECK(c.model.m == 0.7);
  CHECK(c.model.n == 3);
  CHECK(c.grid.count == 400);
  CHECK(c.grid.s_max == 12.0);

  CHECK_THROWS_WITH_AS(config_from_json(R"({"model": {"m": 0.7}})"), doctest::Contains("schema_version"),
                       ValidationError);
  CHECK_THROWS_WITH_AS(config_from_json(R"({"schema_version": 2})"), doctest::Contains("schema_version"),
                       ValidationError);
  CHECK_THROWS_WITH_AS(config_from_json(R"({"schema_version": 1, "model": {"mm": 0.7}})"),
                       doctest::Contains("model.mm"), ValidationError);
  CHECK_THROWS_WITH_AS(config_from_json(R"({"schema_version": 1, "grid": {"count": "x"}})"),
                       doctest::Contains("grid.count"), ValidationError);
  CHECK_THROWS_AS(config_from_json("{not json"), ValidationError);

  const ExperimentConfig w = config_from_json(
      R"({"schema_version": 1, "analysis": {"window": {"value_lo": 1e-9, "t_min": null}}})");
  CHECK(w.analysis.window.value_lo == 1e-9);
  CHECK(w.analysis.window.t_min < -1e299);
}

TEST_CASE("config round trip and validation") {
  ExperimentConfig c;
  c.model.m = 0.8;
  c.sweep.m_values = {0.7, 0.9};
  c.analysis.eta = 1.5;
  const ExperimentConfig back = config_from_json(config_to_json(c));
  CHECK(back.model.m == 0.8);
  CHECK(back.sweep.m_values == c.sweep.m_values);
  REQUIRE(back.analysis.eta.has_value());
  CHECK(*back.analysis.eta == 1.5);
  CHECK(config_to_json(back) == config_to_json(c));

  ExperimentConfig bad;
  bad.model.m = 1.2;
  CHECK_THROWS_WITH_AS(validate(bad), doctest::Contains("model.m"), ValidationError);
  bad = ExperimentConfig{};
  bad.initial.amplitude = 1.5;
  CHECK_THROWS_WITH_AS(validate(bad), doctest::Contains("initial_data.amplitude"), ValidationError);
  bad = ExperimentConfig{};
  bad.output.formats = {"xml"};
  CHECK_THROWS_AS(validate(bad), ValidationError);
  CHECK_NOTHROW(validate(ExperimentConfig{}));
}

TEST_CASE("file values sit between defaults and flags") {
  const auto path = std::filesystem::temp_directory_path() / "fastdiff_lab_cfg_test.json";
  {
    std::ofstream f(path);
    f << R"({"schema_version": 1, "model": {"m": 0.75}, "time": {"dt": 0.002}})";
  }
  ExperimentConfig c = load_config(path);
  CHECK(c.model.m == 0.75);
  CHECK(c.time.dt == 0.002);
  CHECK(c.time.t_final == 4.0);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_config(path), ValidationError);
}

TEST_CASE("number formatting") {
  CHECK(fmt(0.1) == "0.10000000000000001");
  CHECK(fmt(-0.0) == "0");
  CHECK(fmt(1e-20) == "9.9999999999999995e-21");
  CHECK(std::stod(fmt(M_PI)) == M_PI);
  CHECK(fmt(7) == "7");
  Table t{"x", {"a", "b"}, {}};
  t.add({fmt(1.5), "ok"});
  CHECK(to_csv(t) == "a,b\n1.5,ok\n");
}

TEST_CASE("ordered parallel loop") {
  std::vector<int> out(97, -1);
  std::atomic<int> calls{0};
  parallel_for_ordered(97, 4, [&](int i) {
    out[i] = i * i;
    ++calls;
  });
  CHECK(calls == 97);
  for (int i = 0; i < 97; ++i) CHECK(out[i] == i * i);
  CHECK_NOTHROW(parallel_for_ordered(0, 3, [](int) {}));
}

TEST_CASE("sweep keeps input order and reports failures per row") {
  ExperimentConfig c;
  c.grid.count = 300;
  c.sweep.m_values = {0.9, 1.2, 0.7};
  c.sweep.jobs = 2;
  const ReportBundle b = cmd_sweep(c);
  CHECK(b.exit_code == 0);
  REQUIRE(b.tables.size() >= 1);
  const Table& t = b.tables.front();
  REQUIRE(t.rows.size() == 3);
  int status = -1;
  for (std::size_t j = 0; j < t.header.size(); ++j)
    if (t.header[j] == "status") status = static_cast<int>(j);
  REQUIRE(status >= 0);
  CHECK(t.rows[0][1] == fmt(0.9));
  CHECK(t.rows[1][1] == fmt(1.2));
  CHECK(t.rows[2][1] == fmt(0.7));
  CHECK(t.rows[0][status] == "ok");
  CHECK(t.rows[1][status] == "validation_error");
  CHECK(t.rows[2][status] == "ok");

  // Same input, same table.
  CHECK(to_csv(cmd_sweep(c).tables.front()) == to_csv(t));

  c.sweep.m_values = {1.2, 1.3};
  CHECK(cmd_sweep(c).exit_code == 2);
}

TEST_CASE("bundle output") {
  const auto dir = std::filesystem::temp_directory_path() / "fastdiff_lab_bundle_test";
  std::filesystem::remove_all(dir);
  ExperimentConfig c;
  c.output.directory = dir.string();
  const ReportBundle b = cmd_modes(c);
  const auto files = write_bundle(b, c, 0.25);
  CHECK(std::filesystem::exists(dir / "summary.json"));
  std::ifstream in(dir / "summary.json");
  const nlohmann::json j = nlohmann::json::parse(in);
  CHECK(j["command"] == "modes");
  CHECK(j["provenance"]["code_version"] == code_version());
  CHECK(j["provenance"]["config"]["schema_version"] == 1);
  CHECK(j["provenance"]["wall_seconds"] == 0.25);
  for (const auto& f : files) CHECK(std::filesystem::exists(f));

  c.output.formats = {"json"};
  std::filesystem::remove_all(dir);
  const auto only = write_bundle(b, c, 0.0);
  REQUIRE(only.size() == 1);
  CHECK(only.front().filename() == "summary.json");
  std::filesystem::remove_all(dir);
}
