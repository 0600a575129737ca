#include "fulldim/shift_space.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fulldim/errors.hpp"

namespace fulldim {

namespace {

constexpr double kStructuralTol = 1e-12;
constexpr double kStationaryTol = 1e-10;

std::string word_string(std::span<const Symbol> w) {
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += '-';
    s += std::to_string(w[i]);
  }
  return s;
}

void extend_words(const ShiftSpace& space, Word& prefix, std::size_t length,
                  std::vector<Word>& out) {
  if (prefix.size() == length) {
    out.push_back(prefix);
    return;
  }
  const auto n = static_cast<Symbol>(space.symbol_count());
  for (Symbol b = 0; b < n; ++b) {
    if (!prefix.empty() && !space.allowed(prefix.back(), b)) continue;
    prefix.push_back(b);
    extend_words(space, prefix, length, out);
    prefix.pop_back();
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// ShiftSpace

ShiftSpace::ShiftSpace(Eigen::MatrixXi transitions) : transitions_(std::move(transitions)) {
  if (transitions_.rows() == 0 || transitions_.rows() != transitions_.cols())
    throw InvalidInput("transition matrix must be square and non-empty");
  for (Eigen::Index i = 0; i < transitions_.rows(); ++i)
    for (Eigen::Index j = 0; j < transitions_.cols(); ++j)
      if (transitions_(i, j) != 0 && transitions_(i, j) != 1)
        throw InvalidInput("transition matrix entries must be 0 or 1");
  for (Eigen::Index i = 0; i < transitions_.rows(); ++i) {
    if (transitions_.row(i).sum() == 0)
      throw InvalidInput("symbol " + std::to_string(i) + " has no successor (empty row)");
    if (transitions_.col(i).sum() == 0)
      throw InvalidInput("symbol " + std::to_string(i) + " has no predecessor (empty column)");
  }
}

ShiftSpace ShiftSpace::full(std::size_t symbols) {
  const auto n = static_cast<Eigen::Index>(symbols);
  return ShiftSpace(Eigen::MatrixXi::Ones(n, n));
}

bool ShiftSpace::is_allowed(std::span<const Symbol> word) const {
  for (Symbol s : word)
    if (s >= symbol_count()) return false;
  for (std::size_t i = 1; i < word.size(); ++i)
    if (!allowed(word[i - 1], word[i])) return false;
  return true;
}

bool ShiftSpace::is_allowed_cycle(std::span<const Symbol> cycle) const {
  return !cycle.empty() && is_allowed(cycle) && allowed(cycle.back(), cycle.front());
}

std::vector<Word> ShiftSpace::allowed_words(std::size_t length) const {
  std::vector<Word> out;
  if (length == 0) return out;
  Word prefix;
  prefix.reserve(length);
  extend_words(*this, prefix, length, out);
  return out;
}

MixingResult validate_mixing(const ShiftSpace& space) {
  const auto n = static_cast<Eigen::Index>(space.symbol_count());
  const std::size_t bound = static_cast<std::size_t>((n - 1) * (n - 1) + 1);
  const Eigen::MatrixXi a = space.transitions();
  Eigen::MatrixXi power = a;
  for (std::size_t k = 1; k <= bound; ++k) {
    if ((power.array() > 0).all()) return {true, k};
    power = ((power * a).array() > 0).cast<int>();
  }
  return {false, 0};
}

void require_mixing(const ShiftSpace& space, const char* context) {
  if (!validate_mixing(space).mixing)
    throw DomainRejection(std::string(context) + ": transition matrix is not primitive");
}

// ---------------------------------------------------------------------------
// Potential

Potential::Potential(const ShiftSpace& space, std::size_t depth,
                     const std::map<Word, double>& values)
    : depth_(depth) {
  if (depth == 0) throw InvalidInput("potential depth must be positive");
  words_ = space.allowed_words(depth);
  if (words_.empty()) throw InvalidInput("no allowed words of the requested depth");
  values_.reserve(words_.size());
  for (const auto& w : words_) {
    auto it = values.find(w);
    if (it == values.end())
      throw InvalidInput("potential has no value for allowed word " + word_string(w));
    if (!std::isfinite(it->second))
      throw InvalidInput("potential value for word " + word_string(w) + " is not finite");
    values_.push_back(it->second);
  }
  if (values.size() != words_.size()) {
    for (const auto& [w, v] : values) {
      if (!std::binary_search(words_.begin(), words_.end(), w))
        throw InvalidInput("potential assigns a value to disallowed word " + word_string(w));
    }
  }
}

Potential Potential::from_symbols(const ShiftSpace& space, const Eigen::VectorXd& values) {
  if (static_cast<std::size_t>(values.size()) != space.symbol_count())
    throw InvalidInput("depth-1 potential needs one value per symbol");
  Potential p;
  p.depth_ = 1;
  for (Eigen::Index a = 0; a < values.size(); ++a) {
    if (!std::isfinite(values(a))) throw InvalidInput("potential values must be finite");
    p.words_.push_back({static_cast<Symbol>(a)});
    p.values_.push_back(values(a));
  }
  return p;
}

Potential Potential::constant(const ShiftSpace& space, double value) {
  return from_symbols(space,
                      Eigen::VectorXd::Constant(static_cast<Eigen::Index>(space.symbol_count()), value));
}

double Potential::value(std::span<const Symbol> word) const {
  const Word key(word.begin(), word.end());
  auto it = std::lower_bound(words_.begin(), words_.end(), key);
  if (it == words_.end() || *it != key)
    throw InvalidInput("word " + word_string(word) + " is not in the domain of the potential");
  return values_[static_cast<std::size_t>(it - words_.begin())];
}

Eigen::VectorXd Potential::symbol_values() const {
  if (depth_ != 1) throw InvalidInput("operation requires a depth-1 potential (recode first)");
  return Eigen::Map<const Eigen::VectorXd>(values_.data(), static_cast<Eigen::Index>(values_.size()));
}

bool Potential::compatible_with(const ShiftSpace& space) const {
  if (depth_ == 1) return words_.size() == space.symbol_count();
  return words_ == space.allowed_words(depth_);
}

// ---------------------------------------------------------------------------
// MarkovMeasure

MarkovMeasure::MarkovMeasure(Eigen::MatrixXd stochastic, Eigen::VectorXd stationary)
    : stochastic_(std::move(stochastic)), stationary_(std::move(stationary)) {
  const Eigen::Index n = stochastic_.rows();
  if (n == 0 || stochastic_.cols() != n || stationary_.size() != n)
    throw InvalidInput("Markov measure: stochastic matrix and stationary vector sizes disagree");
  if (!stochastic_.allFinite() || !stationary_.allFinite())
    throw InvalidInput("Markov measure: entries must be finite");
  if ((stochastic_.array() < 0.0).any())
    throw InvalidInput("Markov measure: negative transition probability");
  for (Eigen::Index a = 0; a < n; ++a)
    if (std::abs(stochastic_.row(a).sum() - 1.0) > kStructuralTol)
      throw InvalidInput("Markov measure: row " + std::to_string(a) + " does not sum to 1");
  if ((stationary_.array() < -kStructuralTol).any())
    throw InvalidInput("Markov measure: negative stationary probability");
  stationary_ = stationary_.cwiseMax(0.0);
  if (std::abs(stationary_.sum() - 1.0) > kStructuralTol)
    throw InvalidInput("Markov measure: stationary vector does not sum to 1");
  const Eigen::VectorXd drift = stochastic_.transpose() * stationary_ - stationary_;
  if (drift.cwiseAbs().maxCoeff() > kStationaryTol)
    throw InvalidInput("Markov measure: stationary vector is not invariant");
}

MarkovMeasure MarkovMeasure::from_stochastic(Eigen::MatrixXd stochastic) {
  Eigen::VectorXd p = stationary_distribution(stochastic);
  return MarkovMeasure(std::move(stochastic), std::move(p));
}

MarkovMeasure MarkovMeasure::bernoulli(const Eigen::VectorXd& probabilities) {
  const Eigen::Index n = probabilities.size();
  if (n == 0) throw InvalidInput("Bernoulli measure needs at least one symbol");
  Eigen::MatrixXd q(n, n);
  for (Eigen::Index a = 0; a < n; ++a) q.row(a) = probabilities.transpose();
  return MarkovMeasure(std::move(q), probabilities);
}

MarkovMeasure MarkovMeasure::periodic_orbit(const ShiftSpace& space,
                                            std::span<const Symbol> cycle) {
  if (!space.is_allowed_cycle(cycle)) throw InvalidInput("periodic orbit is not an allowed cycle");
  const auto n = static_cast<Eigen::Index>(space.symbol_count());
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (Symbol s : cycle) {
    if (seen[s]) throw InvalidInput("periodic orbit must be a simple cycle");
    seen[s] = true;
  }
  Eigen::MatrixXd q = space.transitions().cast<double>();
  for (Eigen::Index a = 0; a < n; ++a) q.row(a) /= q.row(a).sum();
  Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    const Symbol a = cycle[i];
    const Symbol b = cycle[(i + 1) % cycle.size()];
    q.row(a).setZero();
    q(a, b) = 1.0;
    p(a) = 1.0 / static_cast<double>(cycle.size());
  }
  return MarkovMeasure(std::move(q), std::move(p));
}

bool MarkovMeasure::compatible_with(const ShiftSpace& space) const {
  if (symbol_count() != space.symbol_count()) return false;
  const auto& t = space.transitions();
  for (Eigen::Index a = 0; a < t.rows(); ++a)
    for (Eigen::Index b = 0; b < t.cols(); ++b)
      if (t(a, b) == 0 && stochastic_(a, b) != 0.0) return false;
  return true;
}

double MarkovMeasure::cylinder(std::span<const Symbol> word) const {
  if (word.empty()) return 1.0;
  double m = stationary_(word[0]);
  for (std::size_t i = 1; i < word.size(); ++i) m *= stochastic_(word[i - 1], word[i]);
  return m;
}

Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& stochastic) {
  const Eigen::Index n = stochastic.rows();
  if (n == 0 || stochastic.cols() != n) throw InvalidInput("stochastic matrix must be square");
  Eigen::MatrixXd system(n + 1, n);
  system.topRows(n) = stochastic.transpose() - Eigen::MatrixXd::Identity(n, n);
  system.row(n).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
  rhs(n) = 1.0;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(system);
  qr.setThreshold(1e-10);
  if (qr.rank() < n)
    throw InvalidInput("stationary vector is not unique (chain has several closed classes)");
  Eigen::VectorXd p = qr.solve(rhs);
  p = p.cwiseMax(0.0);
  p /= p.sum();
  return p;
}

// ---------------------------------------------------------------------------
// Operations

HigherBlock higher_block(const ShiftSpace& space, const Potential& potential) {
  if (!potential.compatible_with(space))
    throw InvalidInput("potential is not defined on the allowed words of the shift");
  const std::size_t k = potential.depth();
  if (k == 1) return {space, potential, potential.words()};

  const auto& words = potential.words();
  const auto m = static_cast<Eigen::Index>(words.size());
  Eigen::MatrixXi t = Eigen::MatrixXi::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Word& w = words[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < m; ++j) {
      const Word& v = words[static_cast<std::size_t>(j)];
      if (std::equal(w.begin() + 1, w.end(), v.begin(), v.end() - 1) &&
          space.allowed(w.back(), v.back()))
        t(i, j) = 1;
    }
  }
  ShiftSpace recoded(std::move(t));
  Eigen::VectorXd values = Eigen::Map<const Eigen::VectorXd>(potential.values().data(), m);
  Potential depth_one = Potential::from_symbols(recoded, values);
  return {std::move(recoded), std::move(depth_one), words};
}

double measure_entropy(const MarkovMeasure& measure) {
  const auto& q = measure.stochastic();
  const auto& p = measure.stationary();
  double h = 0.0;
  for (Eigen::Index a = 0; a < q.rows(); ++a) {
    if (p(a) == 0.0) continue;
    double row = 0.0;
    for (Eigen::Index b = 0; b < q.cols(); ++b)
      if (q(a, b) > 0.0) row -= q(a, b) * std::log(q(a, b));
    h += p(a) * row;
  }
  return std::max(h, 0.0);
}

double measure_entropy(const ShiftSpace& space, const MarkovMeasure& measure) {
  if (!measure.compatible_with(space))
    throw InvalidInput("Markov measure is not compatible with the shift space");
  return measure_entropy(measure);
}

double integrate(const Eigen::VectorXd& symbol_values, const MarkovMeasure& measure) {
  if (symbol_values.size() != measure.stationary().size())
    throw InvalidInput("potential and measure live on different alphabets");
  return measure.stationary().dot(symbol_values);
}

double integrate(const Potential& potential, const MarkovMeasure& measure) {
  return integrate(potential.symbol_values(), measure);
}

std::vector<Symbol> sample_path(const MarkovMeasure& measure, std::size_t length,
                                std::mt19937_64& rng) {
  // 53-bit uniforms from raw engine output, so paths do not depend on the
  // standard library's distribution implementations.
  auto uniform = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  auto draw = [&uniform](const auto& probs) {
    const double u = uniform();
    double acc = 0.0;
    Eigen::Index last = 0;
    for (Eigen::Index i = 0; i < probs.size(); ++i) {
      if (probs(i) <= 0.0) continue;
      acc += probs(i);
      last = i;
      if (u < acc) return static_cast<Symbol>(i);
    }
    return static_cast<Symbol>(last);
  };
  std::vector<Symbol> path;
  path.reserve(length);
  if (length == 0) return path;
  path.push_back(draw(measure.stationary()));
  const auto& q = measure.stochastic();
  while (path.size() < length) path.push_back(draw(q.row(path.back())));
  return path;
}

}  // namespace fulldim
