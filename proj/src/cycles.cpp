#include "fulldim/cycles.hpp"

#include <algorithm>
#include <limits>

#include "fulldim/errors.hpp"

namespace fulldim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Word canonical_rotation(Word cycle) {
  auto smallest = std::min_element(cycle.begin(), cycle.end());
  std::rotate(cycle.begin(), smallest, cycle.end());
  return cycle;
}

MeanCycle karp_minimum(const ShiftSpace& space, const Eigen::VectorXd& weights) {
  const auto n = space.symbol_count();
  if (static_cast<std::size_t>(weights.size()) != n)
    throw InvalidInput("cycle weights need one value per symbol");
  const auto& t = space.transitions();

  // best[k][v]: least weight of a k-edge walk ending at v (any start).
  std::vector<std::vector<double>> best(n + 1, std::vector<double>(n, kInf));
  std::vector<std::vector<Symbol>> pred(n + 1, std::vector<Symbol>(n, 0));
  std::fill(best[0].begin(), best[0].end(), 0.0);
  for (std::size_t k = 1; k <= n; ++k) {
    for (std::size_t v = 0; v < n; ++v) {
      for (std::size_t u = 0; u < n; ++u) {
        if (!t(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v))) continue;
        if (best[k - 1][u] == kInf) continue;
        const double cand = best[k - 1][u] + weights(static_cast<Eigen::Index>(u));
        if (cand < best[k][v]) {
          best[k][v] = cand;
          pred[k][v] = static_cast<Symbol>(u);
        }
      }
    }
  }

  double lambda = kInf;
  std::size_t argmin = n;
  for (std::size_t v = 0; v < n; ++v) {
    if (best[n][v] == kInf) continue;
    double worst = -kInf;
    for (std::size_t k = 0; k < n; ++k) {
      if (best[k][v] == kInf) continue;
      worst = std::max(worst, (best[n][v] - best[k][v]) / static_cast<double>(n - k));
    }
    if (worst < lambda) {
      lambda = worst;
      argmin = v;
    }
  }
  if (argmin == n) throw InvalidInput("transition graph has no cycle");

  // Recover the optimal walk x_0 .. x_n and split it into simple cycles; every
  // cycle on it attains the minimum mean, so take the best one as witness.
  std::vector<Symbol> walk(n + 1);
  walk[n] = static_cast<Symbol>(argmin);
  for (std::size_t k = n; k > 0; --k) walk[k - 1] = pred[k][walk[k]];

  MeanCycle result{kInf, {}};
  std::vector<Symbol> stack;
  std::vector<std::ptrdiff_t> position(n, -1);
  for (Symbol x : walk) {
    if (position[x] >= 0) {
      const auto start = static_cast<std::size_t>(position[x]);
      Word cycle(stack.begin() + static_cast<std::ptrdiff_t>(start), stack.end());
      for (std::size_t i = start; i < stack.size(); ++i) position[stack[i]] = -1;
      stack.resize(start);
      const double mean = cycle_mean(cycle, weights);
      if (mean < result.mean) result = {mean, canonical_rotation(std::move(cycle))};
    }
    position[x] = static_cast<std::ptrdiff_t>(stack.size());
    stack.push_back(x);
  }
  if (result.cycle.empty()) throw InvalidInput("failed to extract a witness cycle");
  return result;
}

}  // namespace

double cycle_mean(std::span<const Symbol> cycle, const Eigen::VectorXd& weights) {
  if (cycle.empty()) throw InvalidInput("empty cycle");
  double sum = 0.0;
  for (Symbol s : cycle) sum += weights(s);
  return sum / static_cast<double>(cycle.size());
}

MeanCycle minimum_mean_cycle(const ShiftSpace& space, const Eigen::VectorXd& weights) {
  return karp_minimum(space, weights);
}

MeanCycle maximum_mean_cycle(const ShiftSpace& space, const Eigen::VectorXd& weights) {
  MeanCycle c = karp_minimum(space, -weights);
  c.mean = cycle_mean(c.cycle, weights);
  return c;
}

Eigen::MatrixXi critical_edges(const ShiftSpace& space, const Eigen::VectorXd& weights,
                               double extreme_mean, bool maximize, double tol) {
  const auto n = static_cast<Eigen::Index>(space.symbol_count());
  const auto& t = space.transitions();
  // Reduced weights are <= 0 around every cycle; critical cycles sum to 0.
  Eigen::VectorXd reduced = maximize ? Eigen::VectorXd(weights.array() - extreme_mean)
                                     : Eigen::VectorXd(extreme_mean - weights.array());
  // longest(i, j): heaviest path i -> j, counting the weight of every vertex but j.
  Eigen::MatrixXd longest = Eigen::MatrixXd::Constant(n, n, -kInf);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (t(i, j)) longest(i, j) = reduced(i);
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index i = 0; i < n; ++i) {
      if (longest(i, k) == -kInf) continue;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (longest(k, j) == -kInf) continue;
        longest(i, j) = std::max(longest(i, j), longest(i, k) + longest(k, j));
      }
    }
  Eigen::MatrixXi critical = Eigen::MatrixXi::Zero(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) {
      if (!t(a, b)) continue;
      const double back = (a == b) ? 0.0 : longest(b, a);
      if (back == -kInf) continue;
      if (reduced(a) + back >= -tol) critical(a, b) = 1;
    }
  return critical;
}

std::vector<std::vector<Symbol>> cyclic_components(const Eigen::MatrixXi& adjacency) {
  const Eigen::Index n = adjacency.rows();
  Eigen::MatrixXi reach = (adjacency.array() != 0).cast<int>();
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index i = 0; i < n; ++i)
      if (reach(i, k))
        for (Eigen::Index j = 0; j < n; ++j)
          if (reach(k, j)) reach(i, j) = 1;
  std::vector<std::vector<Symbol>> components;
  std::vector<bool> assigned(static_cast<std::size_t>(n), false);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (assigned[static_cast<std::size_t>(i)] || !reach(i, i)) continue;
    std::vector<Symbol> comp;
    for (Eigen::Index j = i; j < n; ++j)
      if (reach(i, j) && reach(j, i)) {
        comp.push_back(static_cast<Symbol>(j));
        assigned[static_cast<std::size_t>(j)] = true;
      }
    components.push_back(std::move(comp));
  }
  return components;
}

}  // namespace fulldim
