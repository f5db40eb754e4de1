#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hocm/emit.hpp"
#include "hocm/scan.hpp"

using namespace hocm;
using nlohmann::json;

namespace {

// fig2b shrunk so a handful of points evolve in milliseconds
ScenarioConfig small(const std::string& name = "fig2b") {
  ScenarioConfig c = builtin_scenario(name);
  c.cutoff_a = 8;
  c.cutoff_b = 16;
  c.cutoff_p = 12;
  c.xi = {0.0, 0.6, 0.2};
  c.threads = 1;
  return c;
}

ScanRow row(double xi, bool entangled) {
  ScanRow r;
  r.xi = xi;
  r.vector = "v";
  r.bipartition = "a1|a2";
  r.nu_min = entangled ? -1.0 : 1.0;
  r.verdict = entangled ? Verdict::Entangled : Verdict::Undecided;
  return r;
}

int count_lines(const std::string& s) { return int(std::count(s.begin(), s.end(), '\n')); }

std::string scan_text(const ScenarioConfig& c) {
  ScanEngine engine(c, false);
  const auto r = run_scan(engine);
  std::ostringstream out;
  write_rows_csv(out, r.rows);
  write_thresholds_csv(out, r.crossings);
  out << result_to_json(r).dump();
  return out.str();
}

}  // namespace

TEST_CASE("builtin_scenarios_validate") {
  const auto names = builtin_names();
  CHECK(names == std::vector<std::string>{"fig2b", "fig2c", "fig2d", "fig2e", "fig2f", "fig2f-alt", "original2mode"});
  for (const auto& n : names) {
    const auto c = builtin_scenario(n);
    CHECK(c.name == n);
    CHECK_NOTHROW(c.validate());
    CHECK(c.cutoff_p >= required_pump_cutoff(c.hamiltonian.alpha_p));
    CHECK(c.xi.points().size() == 71);
  }
  const auto b = builtin_scenario("fig2b");
  std::vector<std::string> names_b;
  for (const auto& v : b.vectors) names_b.push_back(v.spec.name);
  CHECK(std::find(names_b.begin(), names_b.end(), "R12") != names_b.end());
  CHECK(std::find(names_b.begin(), names_b.end(), "original") != names_b.end());
  CHECK_THROWS_AS(builtin_scenario("fig9"), ConfigError);
}

TEST_CASE("xi_grid_points") {
  const auto p = XiGrid{}.points();
  CHECK(p.size() == 71);
  CHECK(p.front() == 0.0);
  CHECK(p.back() == doctest::Approx(1.4).epsilon(1e-15));
  CHECK(p[35] == 0.7);
  CHECK(XiGrid{0.5, 0.5, 0.1}.points() == std::vector<double>{0.5});
}

TEST_CASE("config_json_round_trip") {
  for (const auto& n : builtin_names()) {
    const json j = config_to_json(builtin_scenario(n));
    CHECK(config_to_json(config_from_json(j)) == j);
  }
}

TEST_CASE("config_errors") {
  const json base = config_to_json(builtin_scenario("fig2d"));
  auto broken = [&](auto edit) {
    json j = base;
    edit(j);
    return j;
  };
  CHECK_THROWS_AS(config_from_json(broken([](json& j) { j["colour"] = 1; })), ConfigError);
  CHECK_THROWS_AS(config_from_json(broken([](json& j) { j["cutoffs"]["a"] = -1; })), ConfigError);
  CHECK_THROWS_AS(config_from_json(broken([](json& j) { j["xi"]["step"] = 0; })), ConfigError);
  CHECK_THROWS_AS(config_from_json(broken([](json& j) { j["network"]["ops"][0]["T"] = 1.5; })), ConfigError);
  CHECK_THROWS_AS(config_from_json(broken([](json& j) { j["hamiltonian"]["pump"] = "laser"; })), ConfigError);
  CHECK_THROWS_AS(config_from_json(broken([](json& j) { j["vectors"][1]["name"] = j["vectors"][0]["name"]; })),
                  ConfigError);
  CHECK_THROWS_AS(config_from_json(broken([](json& j) { j["vectors"][0]["elements"] = "Q{1 a1}"; })),
                  ConfigError);
  CHECK_THROWS_AS(config_from_json(broken([](json& j) { j["vectors"][0]["elements"] = "Q{1 z}; P{1 z}"; })),
                  ConfigError);

  json nonlocal = base;
  nonlocal["vectors"] = json::array({{{"name", "x"},
                                      {"elements", "Q{1 a1, 1 b1}; P{1 a1, 1 b1}; Q{1 a2}; P{1 a2}"},
                                      {"bipartitions", json::array({"a1|a2b1b2"})}}});
  CHECK_THROWS_AS(config_from_json(nonlocal), ConfigError);

  json low_pump = base;
  low_pump["cutoffs"]["p"] = 60;
  try {
    config_from_json(low_pump);
    FAIL("pump cutoff 60 accepted");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("62") != std::string::npos);
  }
  CHECK_THROWS_AS(load_config("/nonexistent/cfg.json"), ConfigError);
}

TEST_CASE("vacuum_point_is_never_entangled") {
  ScenarioConfig c = small();
  c.xi = {0.0, 0.0, 0.1};
  ScanEngine engine(c, false);
  const auto r = run_scan(engine);
  REQUIRE_FALSE(r.rows.empty());
  for (const auto& row : r.rows) {
    CHECK(row.nu_min >= -1e-8);
    CHECK_FALSE(row.entangled());
  }
  CHECK(r.crossings.empty());
  REQUIRE(r.points.size() == 1);
  CHECK(r.points[0].n_a == 0.0);
  CHECK(r.points[0].max_mean < 1e-15);
}

TEST_CASE("scan_rows_cover_every_series") {
  ScanEngine engine(small(), false);
  const auto r = run_scan(engine, {false, 1, {}});
  const auto series = engine.series();
  CHECK(r.rows.size() == series.size() * 4);
  for (std::size_t i = 0; i < series.size(); ++i) {
    CHECK(r.rows[i].vector == series[i].first);
    CHECK(r.rows[i].bipartition == series[i].second);
    CHECK(r.rows[i].xi == 0.0);
  }
  CHECK(engine.evaluate(0.2) == engine.evaluate(0.2));  // cached
  for (const auto& p : r.points) {
    CHECK(std::abs(p.manley_rowe_ab) < 1e-8);
    CHECK(p.min_uncertainty >= -1e-8);
  }
}

TEST_CASE("grid_brackets_rules") {
  std::vector<ScanRow> rows = {row(0.0, false), row(0.1, true), row(0.2, true), row(0.3, false), row(0.4, true)};
  const auto c = grid_brackets(rows);
  REQUIRE(c.size() == 2);  // the step out of xi = 0 does not count
  CHECK(c[0].lo == 0.2);
  CHECK(c[0].hi == 0.3);
  CHECK(c[0].direction == "toward_positive");
  CHECK(c[1].direction == "toward_entangled");
  CHECK(c[1].xi == doctest::Approx(0.35));
}

TEST_CASE("bisect_requires_a_sign_change") {
  ScanEngine engine(small(), false);
  CHECK_THROWS_AS(engine.bisect("R12", "a1|a2b1b2", 0.2, 0.4, 1e-3), CriteriaError);
}

TEST_CASE("csv_writers") {
  std::ostringstream rows, empty;
  write_rows_csv(rows, {row(0.1, true), row(0.2, false)});
  CHECK(count_lines(rows.str()) == 3);
  CHECK(rows.str().rfind("xi,vector,order,bipartition,nu_min,class,verdict,leakage_flag\n", 0) == 0);
  CHECK(rows.str().find("0.1,v,0,a1|a2,-1,") != std::string::npos);
  write_thresholds_csv(empty, {});
  CHECK(empty.str() == "vector,bipartition,crossing_xi,direction\n");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(parse_format("svg") == OutputFormat::Svg);
  CHECK_THROWS_AS(parse_format("xlsx"), EmitError);
}

TEST_CASE("scan_output_is_deterministic") {
  const ScenarioConfig c = small("fig2d");
  CHECK(scan_text(c) == scan_text(c));
}

TEST_CASE("emit_writes_files") {
  ScanEngine engine(small(), false);
  const auto r = run_scan(engine, {false, 1, {}});
  const auto dir = std::filesystem::temp_directory_path() / "hocm_emit_test";
  std::filesystem::remove_all(dir);
  const auto csv = emit(r, dir.string(), OutputFormat::Csv);
  CHECK(csv.size() == 2);
  CHECK(std::filesystem::exists(dir / "fig2b.csv"));
  CHECK(std::filesystem::exists(dir / "fig2b_thresholds.csv"));
  const auto js = emit(r, dir.string(), OutputFormat::Json);
  std::ifstream in(js.at(0));
  const json j = json::parse(in);
  CHECK(j["rows"].size() == r.rows.size());
  emit(r, dir.string(), OutputFormat::Svg);
  std::ifstream svg(dir / "fig2b.svg");
  std::stringstream text;
  text << svg.rdbuf();
  CHECK(text.str().find("<svg") != std::string::npos);
  std::filesystem::remove_all(dir);
}
