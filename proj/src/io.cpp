#include "fulldim/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <set>

namespace fulldim::io {

namespace {

const json& member(const json& j, const std::string& path, const char* key) {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw SchemaError(path + "/" + key, "required field is missing");
  return *it;
}

long long parse_integer(const json& j, const std::string& path) {
  if (j.is_number_integer()) return j.get<long long>();
  if (j.is_number_float()) {
    const double x = j.get<double>();
    if (std::floor(x) == x && std::abs(x) < 1e15) return static_cast<long long>(x);
  }
  throw SchemaError(path, "expected an integer");
}

std::string format(double x, int digits) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

template <class F>
auto with_path(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const SchemaError&) {
    throw;
  } catch (const InvalidInput& e) {
    throw SchemaError(path, e.what());
  }
}

}  // namespace

SchemaError::SchemaError(std::string pointer, const std::string& message)
    : InvalidInput((pointer.empty() ? std::string("/") : pointer) + ": " + message),
      pointer_(std::move(pointer)) {}

json number(double x) {
  if (!std::isfinite(x)) return nullptr;
  const double rounded = std::strtod(format(x, 15).c_str(), nullptr);
  return rounded == 0.0 ? 0.0 : rounded;
}

json vector(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v(i)));
  return out;
}

json matrix(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(vector(m.row(i).transpose()));
  return out;
}

double parse_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw SchemaError(path, "expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) throw SchemaError(path, "expected a finite number");
  return x;
}

Eigen::VectorXd parse_vector(const json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = parse_number(j[i], path + "/" + std::to_string(i));
  return v;
}

Eigen::MatrixXd parse_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw SchemaError(path, "expected a non-empty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string row_path = path + "/" + std::to_string(i);
    const Eigen::VectorXd row = parse_vector(j[i], row_path);
    if (static_cast<std::size_t>(row.size()) != cols)
      throw SchemaError(row_path, "rows must all have the same length");
    m.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  return m;
}

std::string word_key(std::span<const Symbol> word) {
  std::string key;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (i) key += '-';
    key += std::to_string(word[i]);
  }
  return key;
}

Word parse_word(const std::string& key, const std::string& path) {
  Word word;
  std::size_t start = 0;
  while (true) {
    const std::size_t dash = key.find('-', start);
    const std::string part = key.substr(start, dash == std::string::npos ? std::string::npos : dash - start);
    if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos || part.size() > 9)
      throw SchemaError(path, "word \"" + key + "\" is not a '-'-separated list of symbols");
    word.push_back(static_cast<Symbol>(std::stoul(part)));
    if (dash == std::string::npos) break;
    start = dash + 1;
  }
  return word;
}

ShiftSpace parse_shift_space(const json& j, const std::string& path) {
  const long long n = parse_integer(member(j, path, "symbols"), path + "/symbols");
  if (n < 1) throw SchemaError(path + "/symbols", "must be positive");
  const std::string tpath = path + "/transitions";
  const json& t = member(j, path, "transitions");
  if (!t.is_array() || t.size() != static_cast<std::size_t>(n))
    throw SchemaError(tpath, "expected " + std::to_string(n) + " rows");
  Eigen::MatrixXi m(n, n);
  for (long long a = 0; a < n; ++a) {
    const std::string rpath = tpath + "/" + std::to_string(a);
    const json& row = t[static_cast<std::size_t>(a)];
    if (!row.is_array() || row.size() != static_cast<std::size_t>(n))
      throw SchemaError(rpath, "expected " + std::to_string(n) + " entries");
    for (long long b = 0; b < n; ++b) {
      const std::string epath = rpath + "/" + std::to_string(b);
      const long long v = parse_integer(row[static_cast<std::size_t>(b)], epath);
      if (v != 0 && v != 1) throw SchemaError(epath, "transition entries must be 0 or 1");
      m(a, b) = static_cast<int>(v);
    }
  }
  return with_path(tpath, [&] { return ShiftSpace(std::move(m)); });
}

Potential parse_potential(const json& j, const ShiftSpace& space, const std::string& path) {
  if (j.is_array()) {
    const Eigen::VectorXd v = parse_vector(j, path);
    if (static_cast<std::size_t>(v.size()) != space.symbol_count())
      throw SchemaError(path, "expected one value per symbol");
    return Potential::from_symbols(space, v);
  }
  const long long depth = parse_integer(member(j, path, "depth"), path + "/depth");
  if (depth < 1) throw SchemaError(path + "/depth", "must be positive");
  const json& values = member(j, path, "values");
  const std::string vpath = path + "/values";
  if (!values.is_object()) throw SchemaError(vpath, "expected an object keyed by words");
  std::map<Word, double> table;
  for (const auto& [key, value] : values.items()) {
    const std::string kpath = vpath + "/" + key;
    Word w = parse_word(key, kpath);
    if (w.size() != static_cast<std::size_t>(depth))
      throw SchemaError(kpath, "word length differs from depth");
    table[std::move(w)] = parse_number(value, kpath);
  }
  return with_path(vpath, [&] { return Potential(space, static_cast<std::size_t>(depth), table); });
}

MarkovMeasure parse_markov_measure(const json& j, const std::string& path) {
  const Eigen::MatrixXd q = parse_matrix(member(j, path, "stochastic"), path + "/stochastic");
  if (q.rows() != q.cols()) throw SchemaError(path + "/stochastic", "matrix must be square");
  if (j.contains("stationary")) {
    Eigen::VectorXd p = parse_vector(j["stationary"], path + "/stationary");
    return with_path(path, [&] { return MarkovMeasure(q, std::move(p)); });
  }
  return with_path(path, [&] { return MarkovMeasure::from_stochastic(q); });
}

CarpetSystem parse_carpet(const json& j, const std::string& path) {
  ShiftSpace base = parse_shift_space(member(j, path, "base"), path + "/base");
  const std::size_t n = base.symbol_count();
  const json& rows = member(j, path, "rows");
  const std::string rpath = path + "/rows";
  if (!rows.is_array() || rows.size() != n)
    throw SchemaError(rpath, "expected one entry per base symbol (" + std::to_string(n) + ")");
  std::vector<CarpetRow> parsed(n);
  std::set<long long> seen;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const std::string epath = rpath + "/" + std::to_string(k);
    const json& entry = rows[k];
    const long long i = parse_integer(member(entry, epath, "row"), epath + "/row");
    if (i < 0 || i >= static_cast<long long>(n) || !seen.insert(i).second)
      throw SchemaError(epath + "/row", "row indices must be a permutation of the base symbols");
    CarpetRow row;
    const json& cols = member(entry, epath, "columns");
    if (!cols.is_array()) throw SchemaError(epath + "/columns", "expected an array of integers");
    for (std::size_t c = 0; c < cols.size(); ++c)
      row.columns.push_back(static_cast<int>(parse_integer(cols[c], epath + "/columns/" + std::to_string(c))));
    const Eigen::VectorXd phi = parse_vector(member(entry, epath, "phi"), epath + "/phi");
    row.phi.assign(phi.data(), phi.data() + phi.size());
    parsed[static_cast<std::size_t>(i)] = std::move(row);
  }
  Eigen::VectorXd psi = parse_vector(member(j, path, "psi"), path + "/psi");
  return with_path(path, [&] { return CarpetSystem(std::move(base), std::move(parsed), std::move(psi)); });
}

json to_json(const ShiftSpace& space) {
  json t = json::array();
  for (Eigen::Index a = 0; a < space.transitions().rows(); ++a) {
    json row = json::array();
    for (Eigen::Index b = 0; b < space.transitions().cols(); ++b) row.push_back(space.transitions()(a, b));
    t.push_back(std::move(row));
  }
  return {{"symbols", space.symbol_count()}, {"transitions", std::move(t)}};
}

json to_json(const Potential& potential) {
  json values = json::object();
  for (std::size_t i = 0; i < potential.words().size(); ++i)
    values[word_key(potential.words()[i])] = number(potential.values()[i]);
  return {{"depth", potential.depth()}, {"values", std::move(values)}};
}

json to_json(const MarkovMeasure& measure) {
  return {{"stochastic", matrix(measure.stochastic())}, {"stationary", vector(measure.stationary())}};
}

json to_json(const CarpetSystem& system) {
  json rows = json::array();
  for (std::size_t i = 0; i < system.row_count(); ++i) {
    const auto& r = system.rows()[i];
    json phi = json::array();
    for (double v : r.phi) phi.push_back(number(v));
    rows.push_back({{"row", i}, {"columns", r.columns}, {"phi", std::move(phi)}});
  }
  return {{"base", to_json(system.base())}, {"rows", std::move(rows)}, {"psi", vector(system.psi())}};
}

json to_json(const EquilibriumReport& report) {
  return {{"pressure", number(report.pressure)},
          {"measure", to_json(report.measure)},
          {"entropy", number(report.entropy)},
          {"integral_phi", number(report.integral_phi)},
          {"left_eigvec", vector(report.left_eigvec)},
          {"right_eigvec", vector(report.right_eigvec)},
          {"gibbs_lower", number(report.gibbs_lower)},
          {"gibbs_upper", number(report.gibbs_upper)}};
}

json to_json(const BirkhoffRange& range) {
  return {{"lower", number(range.lower)},
          {"upper", number(range.upper)},
          {"lower_cycle", range.lower_cycle},
          {"upper_cycle", range.upper_cycle}};
}

json to_json(const LevelSetSolution& solution) {
  return {{"alpha", number(solution.alpha)},
          {"beta", number(solution.beta)},
          {"pressure_K_alpha", number(solution.pressure_K_alpha)},
          {"maximizer", to_json(solution.maximizer)},
          {"warnings", solution.warnings}};
}

json to_json(const LevelSetRejection& rejection) {
  return {{"error", "domain_rejection"},
          {"reason", to_string(rejection.reason())},
          {"alpha", number(rejection.alpha())},
          {"birkhoff_range", to_json(rejection.range())},
          {"message", rejection.what()}};
}

json to_json(const SpectrumEntry& entry) {
  json out = {{"alpha", number(entry.alpha)}};
  if (entry.solution) {
    out["beta"] = number(entry.solution->beta);
    out["pressure_K_alpha"] = number(entry.solution->pressure_K_alpha);
    out["entropy"] = number(entry.solution->maximizer.entropy);
  } else {
    out["error"] = entry.error;
  }
  return out;
}

json to_json(const FullDimensionReport& report) {
  const auto& d = report.diagnostics;
  json candidates = json::array();
  for (const auto& c : d.candidates)
    candidates.push_back({{"source", c.source},
                          {"D", number(c.D)},
                          {"t", number(c.t)},
                          {"beta", std::isfinite(c.beta) ? number(c.beta) : json(c.beta > 0 ? "+inf" : "-inf")},
                          {"nu", to_json(c.nu)}});
  json weights = json::array();
  for (const auto& w : report.fiber_weights) weights.push_back(vector(w));
  json trace = json::array();
  for (const auto& p : report.trace)
    trace.push_back({{"t", number(p.t)}, {"beta", number(p.beta)}, {"h", number(p.h)}, {"feasible", p.feasible}});
  return {{"D", number(report.D)},
          {"t_star", number(report.t_star)},
          {"beta_star", number(report.beta_star)},
          {"beta_finite", report.beta_finite},
          {"nu_star", to_json(report.nu_star)},
          {"fiber_weights", std::move(weights)},
          {"case", to_string(report.endpoint_case)},
          {"t_range", {number(report.t_lower), number(report.t_upper)}},
          {"degenerate_t_range", report.degenerate_t_range},
          {"diagnostics",
           {{"constraint_residual", number(d.constraint_residual)},
            {"variational_residual", number(d.variational_residual)},
            {"pressure_residual", number(d.pressure_residual)},
            {"interior_sup", number(d.interior_sup)},
            {"bowen_root", number(d.bowen_root)},
            {"t_of_nu_star", number(d.t_of_nu_star)},
            {"dimension_of_nu_star", number(d.dimension_of_nu_star)},
            {"outer_evaluations", d.outer_evaluations},
            {"candidates", std::move(candidates)}}},
          {"trace", std::move(trace)},
          {"warnings", report.warnings}};
}

namespace {

json rounded(const json& j) {
  if (j.is_number_float()) return number(j.get<double>());
  if (j.is_array() || j.is_object()) {
    json out = j;
    for (auto& v : out) v = rounded(v);
    return out;
  }
  return j;
}

}  // namespace

json to_json(const OracleResult& result) {
  return {{"value", number(result.value)},
          {"method", to_string(result.method)},
          {"certificate", rounded(result.certificate)}};
}

json to_json(const GibbsRatioResult& result) {
  json per_length = json::array();
  for (const auto& [lo, hi] : result.per_length) per_length.push_back({number(lo), number(hi)});
  return {{"min_ratio", number(result.min_ratio)},
          {"max_ratio", number(result.max_ratio)},
          {"per_length", std::move(per_length)},
          {"cylinders", result.cylinders}};
}

std::string csv_number(double x) { return format(x, 12); }

void write_spectrum_csv(std::ostream& out, std::span<const SpectrumEntry> entries) {
  out << "alpha,beta,pressure\n";
  for (const auto& e : entries) {
    if (!e.solution) continue;
    out << csv_number(e.alpha) << ',' << csv_number(e.solution->beta) << ','
        << csv_number(e.solution->pressure_K_alpha) << '\n';
  }
}

void write_trace_csv(std::ostream& out, std::span<const TracePoint> trace) {
  out << "t,beta,h\n";
  for (const auto& p : trace) {
    if (!p.feasible) continue;
    out << csv_number(p.t) << ',' << csv_number(p.beta) << ',' << csv_number(p.h) << '\n';
  }
}

}  // namespace fulldim::io
