#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace fulldim {

using Symbol = std::uint32_t;
using Word = std::vector<Symbol>;

/// One-sided subshift of finite type given by a 0/1 transition matrix.
/// Entry (a, b) is 1 iff the two-letter word ab is allowed.
class ShiftSpace {
 public:
  explicit ShiftSpace(Eigen::MatrixXi transitions);

  static ShiftSpace full(std::size_t symbols);

  std::size_t symbol_count() const { return static_cast<std::size_t>(transitions_.rows()); }
  const Eigen::MatrixXi& transitions() const { return transitions_; }

  bool allowed(Symbol a, Symbol b) const { return transitions_(a, b) != 0; }
  bool is_allowed(std::span<const Symbol> word) const;
  /// True iff `cycle` is allowed and its last symbol may be followed by its first.
  bool is_allowed_cycle(std::span<const Symbol> cycle) const;

  /// All allowed words of the given length, in lexicographic order.
  std::vector<Word> allowed_words(std::size_t length) const;

  bool operator==(const ShiftSpace& other) const { return transitions_ == other.transitions_; }

 private:
  Eigen::MatrixXi transitions_;
};

struct MixingResult {
  bool mixing = false;
  /// Smallest power with all entries positive; 0 when not mixing.
  std::size_t witness_power = 0;
};

/// Primitivity test; the search is bounded by Wielandt's (n-1)^2 + 1.
MixingResult validate_mixing(const ShiftSpace& space);

/// Throws DomainRejection when `space` is not mixing.
void require_mixing(const ShiftSpace& space, const char* context);

/// Locally constant potential of depth k: one value per allowed k-word,
/// stored in lexicographic word order.
class Potential {
 public:
  Potential(const ShiftSpace& space, std::size_t depth, const std::map<Word, double>& values);

  /// Depth-1 potential from one value per symbol.
  static Potential from_symbols(const ShiftSpace& space, const Eigen::VectorXd& values);
  static Potential constant(const ShiftSpace& space, double value);

  std::size_t depth() const { return depth_; }
  const std::vector<Word>& words() const { return words_; }
  const std::vector<double>& values() const { return values_; }

  double value(std::span<const Symbol> word) const;

  /// Per-symbol values; requires depth 1.
  Eigen::VectorXd symbol_values() const;

  /// True iff the potential is defined on exactly the allowed words of `space`.
  bool compatible_with(const ShiftSpace& space) const;

 private:
  Potential() = default;

  std::size_t depth_ = 1;
  std::vector<Word> words_;
  std::vector<double> values_;
};

/// Shift-invariant 1-step Markov measure.
class MarkovMeasure {
 public:
  MarkovMeasure(Eigen::MatrixXd stochastic, Eigen::VectorXd stationary);

  /// Computes the stationary vector; throws if it is not unique.
  static MarkovMeasure from_stochastic(Eigen::MatrixXd stochastic);
  static MarkovMeasure bernoulli(const Eigen::VectorXd& probabilities);
  /// Uniform measure on a simple periodic orbit of `space`.
  static MarkovMeasure periodic_orbit(const ShiftSpace& space, std::span<const Symbol> cycle);

  std::size_t symbol_count() const { return static_cast<std::size_t>(stationary_.size()); }
  const Eigen::MatrixXd& stochastic() const { return stochastic_; }
  const Eigen::VectorXd& stationary() const { return stationary_; }

  /// Zero wherever the transitions of `space` are zero.
  bool compatible_with(const ShiftSpace& space) const;

  /// Measure of the cylinder [w_1 ... w_n].
  double cylinder(std::span<const Symbol> word) const;

 private:
  Eigen::MatrixXd stochastic_;
  Eigen::VectorXd stationary_;
};

/// Unique stationary probability vector of a row-stochastic matrix.
/// Throws InvalidInput when the chain has more than one closed class.
Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& stochastic);

struct HigherBlock {
  ShiftSpace space;
  Potential potential;
  /// alphabet[i] is the k-word encoded by new symbol i.
  std::vector<Word> alphabet;
};

/// Recodes a depth-k potential as a depth-1 potential on the k-block shift.
HigherBlock higher_block(const ShiftSpace& space, const Potential& potential);

/// -sum_a p(a) sum_b q(a,b) log q(a,b), with 0 log 0 = 0.
double measure_entropy(const ShiftSpace& space, const MarkovMeasure& measure);
double measure_entropy(const MarkovMeasure& measure);

/// Integral of a depth-1 potential.
double integrate(const Potential& potential, const MarkovMeasure& measure);
double integrate(const Eigen::VectorXd& symbol_values, const MarkovMeasure& measure);

/// Samples x_0 .. x_{length-1} with x_0 drawn from the stationary vector.
std::vector<Symbol> sample_path(const MarkovMeasure& measure, std::size_t length,
                                std::mt19937_64& rng);

}  // namespace fulldim
