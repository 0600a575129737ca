#include "fulldim/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "fulldim/carpet.hpp"
#include "fulldim/errors.hpp"
#include "fulldim/io.hpp"
#include "fulldim/level_set.hpp"
#include "fulldim/oracle.hpp"
#include "fulldim/transfer.hpp"

namespace fulldim::cli {

using io::json;

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"pressure",       "equilibrium", "levelset",
                                              "spectrum",       "birkhoff-range", "carpet-dim",
                                              "measure-dim",    "oracle-compare"};
  return names;
}

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> defaults{
      {"perron_residual", 1e-12}, {"levelset_residual", 1e-10}, {"interior_margin", 1e-9},
      {"t_refine", 1e-10},        {"endpoint", 1e-7},           {"outer", 1e-9},
      {"t_residual", 1e-11},      {"bernoulli_step", 1e-10},
  };
  return defaults;
}

namespace {

struct Context {
  const RunConfig& config;
  const json& input;
  std::map<std::string, double> tol;
  std::size_t threads = 1;
  std::optional<std::string> csv_path;
  std::ostream& log;

  LevelSetOptions level_set() const {
    LevelSetOptions o;
    o.residual_tol = tol.at("levelset_residual");
    o.interior_margin = tol.at("interior_margin");
    o.perron.residual_tol = tol.at("perron_residual");
    return o;
  }

  CarpetOptions carpet() const {
    CarpetOptions o;
    o.t_refine_tol = tol.at("t_refine");
    o.endpoint_tol = tol.at("endpoint");
    o.outer_tol = tol.at("outer");
    o.t_residual = tol.at("t_residual");
    o.level_set = level_set();
    o.threads = threads;
    if (input.contains("t_grid")) {
      const double g = io::parse_number(input["t_grid"], "/t_grid");
      if (g < 1 || std::floor(g) != g) throw io::SchemaError("/t_grid", "expected a positive integer");
      o.t_grid = static_cast<std::size_t>(g);
    }
    return o;
  }

  const json& field(const char* key) const {
    if (!input.contains(key)) throw io::SchemaError(std::string("/") + key, "required field is missing");
    return input[key];
  }
};

json read_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io::SchemaError("", "cannot open input file " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw io::SchemaError("", std::string("input is not valid JSON: ") + e.what());
  }
}

CarpetSystem carpet_from(const Context& c) {
  if (c.input.contains("carpet")) return io::parse_carpet(c.input["carpet"], "/carpet");
  if (c.input.contains("mcmullen")) {
    const json& mc = c.input["mcmullen"];
    const int l = static_cast<int>(io::parse_number(mc.value("l", json()), "/mcmullen/l"));
    const int m = static_cast<int>(io::parse_number(mc.value("m", json()), "/mcmullen/m"));
    const Eigen::VectorXd rows = io::parse_vector(mc.value("rows", json()), "/mcmullen/rows");
    std::vector<int> counts(rows.data(), rows.data() + rows.size());
    try {
      return mcmullen_carpet(l, m, counts);
    } catch (const InvalidInput& e) {
      throw io::SchemaError("/mcmullen", e.what());
    }
  }
  throw io::SchemaError("/carpet", "required field is missing (or give /mcmullen)");
}

std::vector<double> grid_from(const json& g) {
  if (g.is_array()) {
    const Eigen::VectorXd v = io::parse_vector(g, "/grid");
    return {v.data(), v.data() + v.size()};
  }
  const double from = io::parse_number(g.value("from", json()), "/grid/from");
  const double to = io::parse_number(g.value("to", json()), "/grid/to");
  const double count = io::parse_number(g.value("count", json()), "/grid/count");
  if (count < 1 || std::floor(count) != count) throw io::SchemaError("/grid/count", "expected a positive integer");
  const auto n = static_cast<std::size_t>(count);
  std::vector<double> grid(n);
  for (std::size_t k = 0; k < n; ++k)
    grid[k] = n == 1 ? from : from + (to - from) * static_cast<double>(k) / static_cast<double>(n - 1);
  return grid;
}

void write_csv(const Context& c, const char* what, const std::function<void(std::ostream&)>& writer) {
  if (!c.csv_path) {
    c.log << "fulldim: no CSV destination for the " << what << " (use --csv or \"csv_output\")\n";
    return;
  }
  std::ofstream out(*c.csv_path);
  if (!out) throw std::runtime_error("cannot write " + *c.csv_path);
  writer(out);
  c.log << "fulldim: wrote " << what << " to " << *c.csv_path << '\n';
}

json cmd_pressure(const Context& c) {
  const ShiftSpace space = io::parse_shift_space(c.field("shift"), "/shift");
  const Potential phi = io::parse_potential(c.field("phi"), space, "/phi");
  PerronOptions perron;
  perron.residual_tol = c.tol.at("perron_residual");
  return {{"pressure", io::number(pressure(space, phi, perron))}};
}

json cmd_equilibrium(const Context& c) {
  const ShiftSpace space = io::parse_shift_space(c.field("shift"), "/shift");
  const Potential phi = io::parse_potential(c.field("phi"), space, "/phi");
  if (phi.depth() != 1) throw io::SchemaError("/phi/depth", "equilibrium needs a depth-1 potential");
  PerronOptions perron;
  perron.residual_tol = c.tol.at("perron_residual");
  const EquilibriumReport report = equilibrium(space, phi, perron);
  json out = io::to_json(report);
  if (c.input.contains("gibbs_check_length")) {
    const double len = io::parse_number(c.input["gibbs_check_length"], "/gibbs_check_length");
    if (len < 1 || len > 64 || std::floor(len) != len)
      throw io::SchemaError("/gibbs_check_length", "expected an integer in [1, 64]");
    out["gibbs_check"] = io::to_json(gibbs_ratio_check(report, space, phi, static_cast<std::size_t>(len)));
  }
  return out;
}

json cmd_levelset(const Context& c) {
  const ShiftSpace space = io::parse_shift_space(c.field("shift"), "/shift");
  const Potential phi = io::parse_potential(c.field("phi"), space, "/phi");
  const Potential psi = io::parse_potential(c.field("psi"), space, "/psi");
  const double alpha = io::parse_number(c.field("alpha"), "/alpha");
  const LevelSetSolution s = solve_beta(space, phi, psi, alpha, c.level_set());
  json out = io::to_json(s);
  out["birkhoff_range"] = io::to_json(birkhoff_range(space, psi));
  return out;
}

json cmd_spectrum(const Context& c) {
  const ShiftSpace space = io::parse_shift_space(c.field("shift"), "/shift");
  const Potential phi = io::parse_potential(c.field("phi"), space, "/phi");
  const Potential psi = io::parse_potential(c.field("psi"), space, "/psi");
  const std::vector<double> grid = grid_from(c.field("grid"));
  const auto entries = levelset_spectrum(space, phi, psi, grid, c.level_set(), c.threads);
  json list = json::array();
  for (const auto& e : entries) list.push_back(io::to_json(e));
  write_csv(c, "spectrum", [&](std::ostream& os) { io::write_spectrum_csv(os, entries); });
  return {{"birkhoff_range", io::to_json(birkhoff_range(space, psi))},
          {"entries", std::move(list)},
          {"concavity_defect", io::number(concavity_defect(entries))}};
}

json cmd_birkhoff_range(const Context& c) {
  const ShiftSpace space = io::parse_shift_space(c.field("shift"), "/shift");
  const Potential psi = io::parse_potential(c.field("psi"), space, "/psi");
  json out = io::to_json(birkhoff_range(space, psi));
  if (c.input.contains("cycle_check_length")) {
    const double len = io::parse_number(c.input["cycle_check_length"], "/cycle_check_length");
    if (len < 1 || len > 20 || std::floor(len) != len)
      throw io::SchemaError("/cycle_check_length", "expected an integer in [1, 20]");
    const CycleExtremes ex = cycle_enumeration(space, psi, static_cast<std::size_t>(len));
    out["cycle_enumeration"] = {{"lower", io::to_json(ex.lower)}, {"upper", io::to_json(ex.upper)}};
  }
  return out;
}

json cmd_carpet_dim(const Context& c) {
  const CarpetSystem system = carpet_from(c);
  const FullDimensionReport report = solve_full_dimension(system, c.carpet());
  write_csv(c, "trace", [&](std::ostream& os) { io::write_trace_csv(os, report.trace); });
  json out = io::to_json(report);
  out["system"] = io::to_json(system);
  return out;
}

json cmd_measure_dim(const Context& c) {
  const CarpetSystem system = carpet_from(c);
  const MarkovMeasure nu = io::parse_markov_measure(c.field("measure"), "/measure");
  if (!nu.compatible_with(system.base()))
    throw io::SchemaError("/measure", "measure is not supported on the base shift");
  json out = {{"dimension", io::number(measure_dimension(system, nu))},
              {"t_of_nu", io::number(t_of_nu(system, nu, c.tol.at("t_residual")))},
              {"entropy", io::number(measure_entropy(nu))},
              {"integral_psi", io::number(integrate(system.psi(), nu))}};
  if (c.input.contains("fiber_weights")) {
    const json& fw = c.input["fiber_weights"];
    if (!fw.is_array()) throw io::SchemaError("/fiber_weights", "expected one array per row");
    std::vector<Eigen::VectorXd> weights;
    for (std::size_t i = 0; i < fw.size(); ++i)
      weights.push_back(io::parse_vector(fw[i], "/fiber_weights/" + std::to_string(i)));
    try {
      out["ly_dimension"] = io::number(ly_dimension(system, nu, weights));
    } catch (const InvalidInput& e) {
      throw io::SchemaError("/fiber_weights", e.what());
    }
  }
  return out;
}

json cmd_oracle_compare(const Context& c) {
  json out = json::object();
  if (c.input.contains("carpet") || c.input.contains("mcmullen")) {
    const CarpetSystem system = carpet_from(c);
    const FullDimensionReport report = solve_full_dimension(system, c.carpet());
    std::vector<double> values{report.D};
    json carpet = {{"solve_full_dimension", io::number(report.D)},
                   {"case", to_string(report.endpoint_case)}};
    if ((system.base().transitions().array() == 1).all()) {
      BernoulliSearchOptions bo;
      bo.seed = c.config.seed;
      bo.threads = c.threads;
      bo.min_step = c.tol.at("bernoulli_step");
      const OracleResult b = bernoulli_search(system, bo);
      carpet["bernoulli_search"] = io::to_json(b);
      values.push_back(b.value);
    }
    if (c.input.contains("mcmullen")) {
      const json& mc = c.input["mcmullen"];
      const auto rows = mc["rows"].get<std::vector<int>>();
      const OracleResult closed = mcmullen_dimension(mc["l"].get<int>(), mc["m"].get<int>(), rows);
      carpet["mcmullen_closed_form"] = io::to_json(closed);
      values.push_back(closed.value);
    }
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    carpet["max_pairwise_difference"] = io::number(*hi - *lo);
    out["carpet"] = std::move(carpet);
  }
  if (c.input.contains("shift")) {
    const ShiftSpace space = io::parse_shift_space(c.input["shift"], "/shift");
    const Potential psi = io::parse_potential(c.field("psi"), space, "/psi");
    const BirkhoffRange range = birkhoff_range(space, psi);
    const CycleExtremes ex = cycle_enumeration(space, psi, std::min<std::size_t>(space.symbol_count(), 20));
    json level = {{"birkhoff_range", io::to_json(range)},
                  {"cycle_enumeration", {{"lower", io::to_json(ex.lower)}, {"upper", io::to_json(ex.upper)}}}};
    if (c.input.contains("alpha")) {
      const Potential phi = io::parse_potential(c.field("phi"), space, "/phi");
      const double alpha = io::parse_number(c.input["alpha"], "/alpha");
      double resolution = 200;
      if (c.input.contains("resolution")) resolution = io::parse_number(c.input["resolution"], "/resolution");
      const LevelSetSolution s = solve_beta(space, phi, psi, alpha, c.level_set());
      const OracleResult g = constrained_grid_search(space, phi.symbol_values(), psi.symbol_values(), alpha,
                                                     static_cast<std::size_t>(resolution));
      level["solve_beta_pressure"] = io::number(s.pressure_K_alpha);
      level["grid_search"] = io::to_json(g);
      level["gap"] = io::number(s.pressure_K_alpha - g.value);
    }
    out["levelset"] = std::move(level);
  }
  if (out.empty()) throw io::SchemaError("", "oracle-compare needs /carpet, /mcmullen or /shift");
  return out;
}

json dispatch(const Context& c) {
  const std::string& cmd = c.config.command;
  if (cmd == "pressure") return cmd_pressure(c);
  if (cmd == "equilibrium") return cmd_equilibrium(c);
  if (cmd == "levelset") return cmd_levelset(c);
  if (cmd == "spectrum") return cmd_spectrum(c);
  if (cmd == "birkhoff-range") return cmd_birkhoff_range(c);
  if (cmd == "carpet-dim") return cmd_carpet_dim(c);
  if (cmd == "measure-dim") return cmd_measure_dim(c);
  if (cmd == "oracle-compare") return cmd_oracle_compare(c);
  throw io::SchemaError("/command", "unknown command " + cmd);
}

std::map<std::string, double> effective_tolerances(const RunConfig& config, const json& input) {
  std::map<std::string, double> tol = default_tolerances();
  auto set = [&](const std::string& name, double value, const std::string& path) {
    if (!tol.count(name)) throw io::SchemaError(path, "unknown tolerance " + name);
    if (!(value > 0.0) || !std::isfinite(value)) throw io::SchemaError(path, "tolerances must be positive");
    tol[name] = value;
  };
  if (input.contains("tolerances")) {
    const json& t = input["tolerances"];
    if (!t.is_object()) throw io::SchemaError("/tolerances", "expected an object");
    for (const auto& [k, v] : t.items()) set(k, io::parse_number(v, "/tolerances/" + k), "/tolerances/" + k);
  }
  for (const auto& [k, v] : config.tolerances) set(k, v, "--tol " + k);
  return tol;
}

void emit(const RunConfig& config, std::ostream& out, const json& report) {
  const std::string text = report.dump(2) + "\n";
  if (config.output_path) {
    std::ofstream file(*config.output_path);
    if (!file) throw std::runtime_error("cannot write " + *config.output_path);
    file << text;
  } else {
    out << text;
  }
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& log) {
  json report = {{"command", config.command}, {"seed", config.seed}};
  int code = success;
  try {
    if (std::find(commands().begin(), commands().end(), config.command) == commands().end())
      throw io::SchemaError("/command", "unknown command " + config.command);
    const json input = read_input(config.input_path);
    if (!input.is_object()) throw io::SchemaError("", "input must be a JSON object");
    if (input.contains("command") && input["command"] != config.command)
      throw io::SchemaError("/command", "input was written for command " + input["command"].dump());

    Context ctx{config, input, effective_tolerances(config, input), config.threads, config.csv_path, log};
    if (ctx.threads == 0) ctx.threads = std::max(1u, std::thread::hardware_concurrency());
    if (!ctx.csv_path && input.contains("csv_output")) {
      if (!input["csv_output"].is_string()) throw io::SchemaError("/csv_output", "expected a path");
      ctx.csv_path = input["csv_output"].get<std::string>();
    }
    if (!ctx.csv_path && config.output_path)
      ctx.csv_path = std::filesystem::path(*config.output_path).replace_extension(".csv").string();

    json tol = json::object();
    log << "fulldim " << config.command << ": seed=" << config.seed << " threads=" << ctx.threads
        << " tolerances:";
    for (const auto& [k, v] : ctx.tol) {
      tol[k] = io::number(v);
      log << ' ' << k << '=' << v;
    }
    log << '\n';
    report["tolerances"] = std::move(tol);
    report["result"] = dispatch(ctx);
  } catch (const LevelSetRejection& e) {
    report["error"] = io::to_json(e);
    code = rejected;
  } catch (const io::SchemaError& e) {
    report["error"] = {{"error", "schema_error"}, {"pointer", e.pointer()}, {"message", e.what()}};
    code = rejected;
  } catch (const InvalidInput& e) {
    report["error"] = {{"error", "invalid_input"}, {"message", e.what()}};
    code = rejected;
  } catch (const DomainRejection& e) {
    report["error"] = {{"error", "domain_rejection"}, {"message", e.what()}};
    code = rejected;
  } catch (const std::exception& e) {
    report["error"] = {{"error", "internal_failure"}, {"message", e.what()}};
    code = internal_failure;
  }
  if (code != success) log << "fulldim " << config.command << ": " << report["error"]["message"].get<std::string>() << '\n';
  try {
    emit(config, out, report);
  } catch (const std::exception& e) {
    log << "fulldim: " << e.what() << '\n';
    return internal_failure;
  }
  return code;
}

}  // namespace fulldim::cli
