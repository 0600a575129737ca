#include "fulldim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "fulldim/cycles.hpp"
#include "fulldim/detail/parallel.hpp"
#include "fulldim/errors.hpp"

namespace fulldim {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double plogp_sum(const Eigen::VectorXd& w) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (w(i) > 0.0) h -= w(i) * std::log(w(i));
  return h;
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

/// Euclidean projection onto the probability simplex.
Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& x) {
  std::vector<double> u(x.data(), x.data() + x.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    cumulative += u[k];
    const double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (u[k] - candidate > 0.0) theta = candidate;
  }
  Eigen::VectorXd p = (x.array() - theta).max(0.0);
  return p / p.sum();
}

double uniform01(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

struct SearchOutcome {
  double value = -kInf;
  Eigen::VectorXd weights;
  std::size_t sweeps = 0;
};

SearchOutcome compass_search(const CarpetSystem& system, Eigen::VectorXd x,
                             const BernoulliSearchOptions& options) {
  SearchOutcome out;
  out.weights = std::move(x);
  out.value = bernoulli_objective(system, out.weights);
  const Eigen::Index n = out.weights.size();
  double step = options.initial_step;
  while (step >= options.min_step) {
    ++out.sweeps;
    bool improved = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i == j) continue;
        Eigen::VectorXd trial = out.weights;
        trial(i) += step;
        trial(j) -= step;
        trial = project_to_simplex(trial);
        const double v = bernoulli_objective(system, trial);
        if (v > out.value) {
          out.value = v;
          out.weights = std::move(trial);
          improved = true;
        }
      }
    }
    if (!improved) step *= options.shrink;
  }
  return out;
}

void require_full_shift(const ShiftSpace& space) {
  if ((space.transitions().array() != 1).any())
    throw InvalidInput("bernoulli_search requires a full-shift base");
}

}  // namespace

const char* to_string(OracleMethod method) {
  switch (method) {
    case OracleMethod::mcmullen_closed_form: return "mcmullen_closed_form";
    case OracleMethod::bernoulli_search: return "bernoulli_search";
    case OracleMethod::cycle_enumeration: return "cycle_enumeration";
    case OracleMethod::grid_search: return "grid_search";
  }
  return "unknown";
}

OracleResult mcmullen_dimension(int l, int m, std::span<const int> row_counts) {
  if (!(l > m && m > 1)) throw InvalidInput("mcmullen_dimension needs integers l > m > 1");
  if (row_counts.empty()) throw InvalidInput("mcmullen_dimension needs row counts");
  const double a = std::log(static_cast<double>(m)) / std::log(static_cast<double>(l));
  double z = 0.0;
  for (int r : row_counts) {
    if (r < 0 || r > l) throw InvalidInput("mcmullen_dimension: row counts must lie in [0, l]");
    if (r > 0) z += std::pow(static_cast<double>(r), a);
  }
  if (z == 0.0) throw InvalidInput("mcmullen_dimension needs at least one rectangle");

  std::vector<double> weights;
  std::vector<double> row_weights;
  for (int r : row_counts) {
    if (r == 0) continue;
    const double rr = static_cast<double>(r);
    row_weights.push_back(std::pow(rr, a) / z);
    for (int j = 0; j < r; ++j) weights.push_back(std::pow(rr, a - 1.0) / z);
  }
  OracleResult result;
  result.value = std::log(z) / std::log(static_cast<double>(m));
  result.method = OracleMethod::mcmullen_closed_form;
  result.certificate = {{"l", l},
                        {"m", m},
                        {"row_counts", std::vector<int>(row_counts.begin(), row_counts.end())},
                        {"exponent", a},
                        {"row_weights", row_weights},
                        {"weights", weights}};
  return result;
}

double bernoulli_objective(const CarpetSystem& system, const Eigen::VectorXd& weights) {
  if (static_cast<std::size_t>(weights.size()) != system.rectangle_count())
    throw InvalidInput("bernoulli_objective: one weight per rectangle expected");
  const auto rows = static_cast<Eigen::Index>(system.row_count());
  Eigen::VectorXd row_mass = Eigen::VectorXd::Zero(rows);
  double int_phi = 0.0;
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (double phi : system.rows()[static_cast<std::size_t>(i)].phi) {
      row_mass(i) += weights(k);
      int_phi += weights(k) * phi;
      ++k;
    }
  }
  const double h_nu = plogp_sum(row_mass);
  const double h_mu = plogp_sum(weights);
  return h_nu / row_mass.dot(system.psi()) + (h_mu - h_nu) / int_phi;
}

OracleResult bernoulli_search(const CarpetSystem& system, const BernoulliSearchOptions& options) {
  require_full_shift(system.base());
  if (options.starts == 0) throw InvalidInput("bernoulli_search needs at least one start");
  if (!(options.shrink > 0.0 && options.shrink < 1.0) || !(options.min_step > 0.0) ||
      !(options.initial_step > options.min_step))
    throw InvalidInput("bernoulli_search: invalid step parameters");

  const auto n = static_cast<Eigen::Index>(system.rectangle_count());
  std::vector<Eigen::VectorXd> starts;
  std::mt19937_64 rng(options.seed);
  starts.push_back(Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n)));
  while (starts.size() < options.starts) {
    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = -std::log(uniform01(rng));
    starts.push_back(x / x.sum());
  }

  std::vector<SearchOutcome> outcomes(starts.size());
  detail::parallel_for(starts.size(), options.threads, [&](std::size_t k) {
    outcomes[k] = compass_search(system, starts[k], options);
  });
  std::size_t best = 0;
  for (std::size_t k = 1; k < outcomes.size(); ++k)
    if (outcomes[k].value > outcomes[best].value) best = k;

  OracleResult result;
  result.value = outcomes[best].value;
  result.method = OracleMethod::bernoulli_search;
  result.certificate = {{"weights", to_std(outcomes[best].weights)},
                        {"seed", options.seed},
                        {"starts", options.starts},
                        {"best_start", best},
                        {"shrink", options.shrink},
                        {"min_step", options.min_step}};
  return result;
}

CycleExtremes cycle_enumeration(const ShiftSpace& space, const Eigen::VectorXd& psi,
                                std::size_t max_len, std::size_t guard) {
  if (max_len == 0 || max_len > 20) throw InvalidInput("cycle_enumeration: max_len must be in [1, 20]");
  const auto n = static_cast<Symbol>(space.symbol_count());
  if (static_cast<std::size_t>(psi.size()) != n)
    throw InvalidInput("cycle_enumeration: psi needs one value per symbol");

  CycleExtremes out;
  double best_lo = kInf;
  double best_hi = -kInf;
  Word lo_cycle;
  Word hi_cycle;
  Word path;
  std::vector<char> on_path(n, 0);

  // Cycles are enumerated from their smallest symbol s through symbols > s.
  auto record = [&](double sum) {
    if (++out.cycles > guard)
      throw DomainRejection("cycle_enumeration: more than " + std::to_string(guard) + " cycles");
    const double mean = sum / static_cast<double>(path.size());
    if (mean < best_lo) {
      best_lo = mean;
      lo_cycle = path;
    }
    if (mean > best_hi) {
      best_hi = mean;
      hi_cycle = path;
    }
  };
  auto extend = [&](auto&& self, Symbol s, double sum) -> void {
    const Symbol last = path.back();
    if (space.allowed(last, s)) record(sum);
    if (path.size() == max_len) return;
    for (Symbol v = s + 1; v < n; ++v) {
      if (on_path[v] || !space.allowed(last, v)) continue;
      on_path[v] = 1;
      path.push_back(v);
      self(self, s, sum + psi(v));
      path.pop_back();
      on_path[v] = 0;
    }
  };
  for (Symbol s = 0; s < n; ++s) {
    path.assign(1, s);
    on_path[s] = 1;
    extend(extend, s, psi(s));
    on_path[s] = 0;
  }
  if (out.cycles == 0) throw DomainRejection("cycle_enumeration: no cycles of length <= max_len");

  auto make = [&](double value, const Word& cycle) {
    return OracleResult{value, OracleMethod::cycle_enumeration,
                        json{{"cycle", cycle}, {"length", cycle.size()}, {"max_len", max_len},
                             {"cycles_enumerated", out.cycles}}};
  };
  out.lower = make(best_lo, lo_cycle);
  out.upper = make(best_hi, hi_cycle);
  return out;
}

CycleExtremes cycle_enumeration(const ShiftSpace& space, const Potential& psi, std::size_t max_len,
                                std::size_t guard) {
  if (psi.depth() != 1 || !psi.compatible_with(space))
    throw InvalidInput("cycle_enumeration needs a depth-1 potential on the shift");
  return cycle_enumeration(space, psi.symbol_values(), max_len, guard);
}

namespace {

/// All vectors of `parts` nonnegative integers summing to `total`, in
/// lexicographic order.
void compositions(std::size_t total, std::size_t parts, std::vector<std::size_t>& current,
                  std::vector<std::vector<std::size_t>>& out) {
  if (parts == 1) {
    current.push_back(total);
    out.push_back(current);
    current.pop_back();
    return;
  }
  for (std::size_t k = 0; k <= total; ++k) {
    current.push_back(k);
    compositions(total - k, parts - 1, current, out);
    current.pop_back();
  }
}

}  // namespace

OracleResult constrained_grid_search(const ShiftSpace& space, const Eigen::VectorXd& phi,
                                     const Eigen::VectorXd& psi, double alpha,
                                     std::size_t resolution) {
  const std::size_t n = space.symbol_count();
  if (n > 3) throw InvalidInput("constrained_grid_search supports at most 3 symbols");
  if (resolution < 1 || resolution > 200)
    throw InvalidInput("constrained_grid_search: resolution must be in [1, 200]");
  if (static_cast<std::size_t>(phi.size()) != n || static_cast<std::size_t>(psi.size()) != n)
    throw InvalidInput("constrained_grid_search: phi and psi need one value per symbol");
  const double step = 1.0 / static_cast<double>(resolution);

  std::vector<std::vector<Symbol>> successors(n);
  for (Symbol a = 0; a < n; ++a)
    for (Symbol b = 0; b < n; ++b)
      if (space.allowed(a, b)) successors[a].push_back(b);

  // The pivot row splits its first two entries as (s c, (1 - s) c), with s
  // solved from the constraint; every other free entry lies on the grid.
  std::size_t pivot = n;
  for (std::size_t a = 0; a < n && pivot == n; ++a)
    if (successors[a].size() >= 2) pivot = a;

  std::vector<std::vector<std::vector<std::size_t>>> choices(n);
  std::size_t outer = 1;
  for (std::size_t a = 0; a < n; ++a) {
    std::vector<std::size_t> scratch;
    const std::size_t parts = a == pivot ? successors[a].size() - 1 : successors[a].size();
    compositions(resolution, parts, scratch, choices[a]);
    outer *= choices[a].size();
  }
  constexpr double kGuard = 2e7;
  if (static_cast<double>(outer) * static_cast<double>(resolution + 1) > kGuard)
    throw DomainRejection("constrained_grid_search: grid exceeds the enumeration guard");

  auto build = [&](const std::vector<std::size_t>& index, double s) {
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t a = 0; a < n; ++a) {
      const auto& c = choices[a][index[a]];
      if (a == pivot) {
        const double head = static_cast<double>(c[0]) * step;
        q(a, successors[a][0]) = s * head;
        q(a, successors[a][1]) = (1.0 - s) * head;
        for (std::size_t k = 1; k < c.size(); ++k)
          q(a, successors[a][k + 1]) = static_cast<double>(c[k]) * step;
      } else {
        for (std::size_t k = 0; k < c.size(); ++k)
          q(a, successors[a][k]) = static_cast<double>(c[k]) * step;
      }
    }
    return q;
  };
  // Constraint defect of the unique stationary vector; NaN if not unique.
  auto defect = [&](const Eigen::MatrixXd& q, Eigen::VectorXd& p) {
    try {
      p = stationary_distribution(q);
    } catch (const Error&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
    return p.dot(psi) - alpha;
  };

  double best = -kInf;
  Eigen::MatrixXd best_q;
  Eigen::VectorXd best_p;
  double best_residual = 0.0;
  std::size_t feasible = 0;
  auto consider = [&](const Eigen::MatrixXd& q) {
    Eigen::VectorXd p;
    const double r = defect(q, p);
    if (!(std::abs(r) <= 1e-12)) return;
    ++feasible;
    try {
      const MarkovMeasure mu(q, p);
      const double v = measure_entropy(mu) + integrate(phi, mu);
      if (v > best) {
        best = v;
        best_q = q;
        best_p = mu.stationary();
        best_residual = r;
      }
    } catch (const Error&) {
    }
  };

  std::vector<std::size_t> index(n, 0);
  for (std::size_t point = 0; point < outer; ++point) {
    std::size_t rest = point;
    for (std::size_t a = n; a-- > 0;) {
      index[a] = rest % choices[a].size();
      rest /= choices[a].size();
    }
    if (pivot == n) {
      consider(build(index, 0.0));
      continue;
    }
    // Scan s on the grid, then bisect every sign change of the defect.
    Eigen::VectorXd p;
    double s_prev = 0.0;
    double f_prev = defect(build(index, 0.0), p);
    if (f_prev == 0.0) consider(build(index, 0.0));
    for (std::size_t k = 1; k <= resolution; ++k) {
      const double s = static_cast<double>(k) * step;
      const double f = defect(build(index, s), p);
      if (f == 0.0) consider(build(index, s));
      if (std::isfinite(f) && std::isfinite(f_prev) && f * f_prev < 0.0) {
        double lo = s_prev;
        double hi = s;
        double f_lo = f_prev;
        for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double fm = defect(build(index, mid), p);
          if (!std::isfinite(fm)) break;
          if ((fm < 0.0) == (f_lo < 0.0)) {
            lo = mid;
            f_lo = fm;
          } else {
            hi = mid;
          }
        }
        Eigen::VectorXd p_lo;
        Eigen::VectorXd p_hi;
        const double r_lo = std::abs(defect(build(index, lo), p_lo));
        const double r_hi = std::abs(defect(build(index, hi), p_hi));
        consider(build(index, r_lo <= r_hi ? lo : hi));
      }
      s_prev = s;
      f_prev = f;
    }
  }
  if (feasible == 0 || !std::isfinite(best))
    throw DomainRejection("constrained_grid_search: no feasible measure at this resolution");

  std::vector<std::vector<double>> rows;
  for (Eigen::Index a = 0; a < best_q.rows(); ++a) rows.push_back(to_std(best_q.row(a).transpose()));
  OracleResult result;
  result.value = best;
  result.method = OracleMethod::grid_search;
  result.certificate = {{"resolution", resolution},
                        {"alpha", alpha},
                        {"stochastic", rows},
                        {"stationary", to_std(best_p)},
                        {"constraint_residual", best_residual},
                        {"feasible_points", feasible}};
  return result;
}

double grid_certificate_value(const json& certificate, const Eigen::VectorXd& phi) {
  const auto rows = certificate.at("stochastic").get<std::vector<std::vector<double>>>();
  const auto p = certificate.at("stationary").get<std::vector<double>>();
  const auto n = static_cast<Eigen::Index>(p.size());
  Eigen::MatrixXd q(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) q(a, b) = rows.at(static_cast<std::size_t>(a)).at(static_cast<std::size_t>(b));
  const MarkovMeasure mu(q, Eigen::Map<const Eigen::VectorXd>(p.data(), n));
  return measure_entropy(mu) + integrate(phi, mu);
}

}  // namespace fulldim
