#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "fulldim/carpet.hpp"
#include "fulldim/errors.hpp"
#include "fulldim/level_set.hpp"
#include "fulldim/oracle.hpp"
#include "fulldim/shift_space.hpp"
#include "fulldim/transfer.hpp"

namespace fulldim::io {

using nlohmann::json;

/// Schema violation at a JSON-pointer path such as /rows/1/phi/0.
class SchemaError : public InvalidInput {
 public:
  SchemaError(std::string pointer, const std::string& message);
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

/// Rounds to 15 significant digits; non-finite values become null.
json number(double x);
json vector(const Eigen::VectorXd& v);
json matrix(const Eigen::MatrixXd& m);

// Parsers take the JSON-pointer path of `j` for error messages.
ShiftSpace parse_shift_space(const json& j, const std::string& path = "");
Potential parse_potential(const json& j, const ShiftSpace& space, const std::string& path = "");
MarkovMeasure parse_markov_measure(const json& j, const std::string& path = "");
CarpetSystem parse_carpet(const json& j, const std::string& path = "");
double parse_number(const json& j, const std::string& path);
Eigen::VectorXd parse_vector(const json& j, const std::string& path);
Eigen::MatrixXd parse_matrix(const json& j, const std::string& path);

/// "0-1-1" <-> {0, 1, 1}.
std::string word_key(std::span<const Symbol> word);
Word parse_word(const std::string& key, const std::string& path);

json to_json(const ShiftSpace& space);
json to_json(const Potential& potential);
json to_json(const MarkovMeasure& measure);
json to_json(const CarpetSystem& system);
json to_json(const EquilibriumReport& report);
json to_json(const BirkhoffRange& range);
json to_json(const LevelSetSolution& solution);
json to_json(const LevelSetRejection& rejection);
json to_json(const SpectrumEntry& entry);
json to_json(const FullDimensionReport& report);
json to_json(const OracleResult& result);
json to_json(const GibbsRatioResult& result);

/// Header alpha,beta,pressure; failed grid points are skipped.
void write_spectrum_csv(std::ostream& out, std::span<const SpectrumEntry> entries);
/// Header t,beta,h; infeasible points are skipped.
void write_trace_csv(std::ostream& out, std::span<const TracePoint> trace);

/// Shortest decimal form with 12 significant digits.
std::string csv_number(double x);

}  // namespace fulldim::io
