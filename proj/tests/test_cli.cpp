#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fulldim/cli.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = 0;
  json report;
  std::string text;
};

Outcome run_file(const std::string& command, const std::string& path, std::size_t threads = 1) {
  fulldim::cli::RunConfig config;
  config.command = command;
  config.input_path = path;
  config.threads = threads;
  config.csv_path = (fs::temp_directory_path() / ("fulldim_cli_test_" + command + ".csv")).string();
  std::ostringstream out, log;
  Outcome o;
  o.code = fulldim::cli::run(config, out, log);
  o.text = out.str();
  o.report = json::parse(o.text);
  return o;
}

Outcome run_data(const std::string& command, const std::string& name, std::size_t threads = 1) {
  return run_file(command, std::string(FULLDIM_DATA_DIR) + "/" + name, threads);
}

Outcome run_json(const std::string& command, const json& input) {
  const fs::path path = fs::temp_directory_path() / ("fulldim_cli_input_" + command + ".json");
  std::ofstream(path) << input.dump();
  return run_file(command, path.string());
}

}  // namespace

TEST_CASE("pressure of the full 2-shift") {
  const Outcome o = run_data("pressure", "full_shift_pressure.json");
  CHECK(o.code == 0);
  CHECK(o.report["result"]["pressure"].get<double>() == doctest::Approx(0.693147).epsilon(1e-6));
  CHECK(o.report["tolerances"]["perron_residual"].get<double>() == 1e-12);
}

TEST_CASE("levelset outside the Birkhoff range is rejected") {
  const Outcome o = run_data("levelset", "levelset_outside_range.json");
  CHECK(o.code == 2);
  const json& e = o.report["error"];
  CHECK(e["reason"] == "outside_range");
  CHECK(e["birkhoff_range"]["upper"].get<double>() == 0.5);
  CHECK(e["birkhoff_range"]["upper_cycle"] == json::array({0, 1}));
}

TEST_CASE("golden-base carpet") {
  const Outcome one = run_data("carpet-dim", "golden_base_carpet.json", 1);
  const Outcome four = run_data("carpet-dim", "golden_base_carpet.json", 4);
  CHECK(one.code == 0);
  CHECK(one.text == four.text);
  const json& r = one.report["result"];
  CHECK(r["D"].get<double>() == doctest::Approx(1.039459824511).epsilon(1e-9));
  CHECK(r["t_range"][0].get<double>() == doctest::Approx(0.354382).epsilon(1e-5));
  CHECK(r["t_range"][1].get<double>() == doctest::Approx(0.530620).epsilon(1e-5));
}

TEST_CASE("McMullen carpet from the input shorthand") {
  const Outcome o = run_json("carpet-dim", {{"mcmullen", {{"l", 3}, {"m", 2}, {"rows", {2, 1}}}}});
  CHECK(o.code == 0);
  const json& r = o.report["result"];
  CHECK(r["D"].get<double>() == doctest::Approx(1.3496838201955774).epsilon(1e-9));
  CHECK(r["t_range"][0].get<double>() == 0.0);
  CHECK(r["t_range"][1].get<double>() == doctest::Approx(0.630930).epsilon(1e-6));
}

TEST_CASE("Birkhoff range with cycle enumeration") {
  const Outcome o = run_data("birkhoff-range", "birkhoff_cyclic.json");
  CHECK(o.code == 0);
  CHECK(o.report["result"]["lower"].get<double>() == 1.0);
  CHECK(o.report["result"]["upper"].get<double>() == 3.0);
}

TEST_CASE("schema and command errors") {
  const Outcome bad = run_json("pressure", {{"shift", {{"symbols", 2}, {"transitions", {{1, 1}, {1, 7}}}}},
                                            {"phi", {0.0, 0.0}}});
  CHECK(bad.code == 2);
  CHECK(bad.report["error"]["error"] == "schema_error");
  CHECK(bad.report["error"]["pointer"] == "/shift/transitions/1/1");

  const Outcome mismatch = run_data("pressure", "levelset_outside_range.json");
  CHECK(mismatch.code == 2);
  CHECK(mismatch.report["error"]["pointer"] == "/command");

  const Outcome unknown_tol = run_json("pressure", {{"shift", {{"symbols", 1}, {"transitions", {{1}}}}},
                                                    {"phi", {0.0}},
                                                    {"tolerances", {{"nonsense", 1e-3}}}});
  CHECK(unknown_tol.code == 2);

  const Outcome missing = run_file("pressure", "/nonexistent/input.json");
  CHECK(missing.code == 2);
}
