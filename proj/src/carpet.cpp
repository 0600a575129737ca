#include "fulldim/carpet.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <sstream>

#include "fulldim/cycles.hpp"
#include "fulldim/detail/parallel.hpp"
#include "fulldim/detail/root_finding.hpp"
#include "fulldim/errors.hpp"

namespace fulldim {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kScanBlock = 8;

double log_sum_exp(const std::vector<double>& phi, double t) {
  double top = -kInf;
  for (double v : phi) top = std::max(top, -t * v);
  double sum = 0.0;
  for (double v : phi) sum += std::exp(-t * v - top);
  return top + std::log(sum);
}

double row_entropy(const Eigen::VectorXd& w) {
  double h = 0.0;
  for (Eigen::Index j = 0; j < w.size(); ++j)
    if (w(j) > 0.0) h -= w(j) * std::log(w(j));
  return h;
}

void check_fiber_weights(const CarpetSystem& system, const std::vector<Eigen::VectorXd>& weights) {
  if (weights.size() != system.row_count())
    throw InvalidInput("fiber weights need one vector per row");
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const auto& w = weights[i];
    if (static_cast<std::size_t>(w.size()) != system.rows()[i].columns.size())
      throw InvalidInput("fiber weights of row " + std::to_string(i) +
                         " do not match its column count");
    if ((w.array() < 0.0).any() || std::abs(w.sum() - 1.0) > 1e-12)
      throw InvalidInput("fiber weights of row " + std::to_string(i) +
                         " are not a probability vector");
  }
}

/// Gibbs state of `phi` restricted to the edges `edges` inside one cyclic
/// component, embedded as a Markov measure on the whole base alphabet.
struct ComponentGibbs {
  double pressure;
  MarkovMeasure measure;
};

ComponentGibbs component_gibbs(const ShiftSpace& base, const Eigen::MatrixXi& edges,
                               const std::vector<Symbol>& component, const Eigen::VectorXd& phi) {
  const auto k = static_cast<Eigen::Index>(component.size());
  double shift = -kInf;
  for (Symbol a : component) shift = std::max(shift, phi(a));
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      if (edges(component[static_cast<std::size_t>(i)], component[static_cast<std::size_t>(j)]))
        m(i, j) = std::exp(phi(component[static_cast<std::size_t>(i)]) - shift);
  // The component may be periodic; M + I is primitive with the same Perron vectors.
  const PerronData perron = perron_data(m + Eigen::MatrixXd::Identity(k, k));
  const double rho = perron.eigenvalue - 1.0;
  if (!(rho > 0.0)) throw ConvergenceFailure("component spectral radius is not positive");

  const auto n = static_cast<Eigen::Index>(base.symbol_count());
  Eigen::MatrixXd q = base.transitions().cast<double>();
  for (Eigen::Index a = 0; a < n; ++a) q.row(a) /= q.row(a).sum();
  Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
  double mass = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    const Symbol a = component[static_cast<std::size_t>(i)];
    q.row(a).setZero();
    for (Eigen::Index j = 0; j < k; ++j)
      q(a, component[static_cast<std::size_t>(j)]) =
          m(i, j) * perron.right(j) / (rho * perron.right(i));
    q.row(a) /= q.row(a).sum();
    p(a) = perron.left(i) * perron.right(i);
    mass += p(a);
  }
  p /= mass;
  return {std::log(rho) + shift, MarkovMeasure(std::move(q), std::move(p))};
}

/// Root of a decreasing pressure-like function of s >= 0 with f(0) >= 0.
template <class F>
double decreasing_root_from_zero(F&& f, double ftol) {
  const double f0 = f(0.0);
  if (f0 <= ftol) return 0.0;
  auto increasing = [&](double s) { return -f(s); };
  const detail::Bracket bracket = detail::expand_increasing(increasing, 0.0, 1.0);
  return detail::bracketed_root(increasing, bracket, ftol, 0.0).x;
}

}  // namespace

// ---------------------------------------------------------------------------
// CarpetSystem

CarpetSystem::CarpetSystem(ShiftSpace base, std::vector<CarpetRow> rows, Eigen::VectorXd psi)
    : base_(std::move(base)), rows_(std::move(rows)), psi_(std::move(psi)) {
  if (rows_.size() != base_.symbol_count())
    throw InvalidInput("carpet: number of rows differs from the base alphabet size");
  if (static_cast<std::size_t>(psi_.size()) != rows_.size())
    throw InvalidInput("carpet: psi needs one value per row");
  double min_phi = kInf;
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const auto& row = rows_[i];
    const std::string where = "carpet row " + std::to_string(i);
    if (row.columns.empty()) throw InvalidInput(where + " has no columns");
    if (row.columns.size() != row.phi.size())
      throw InvalidInput(where + ": columns and phi differ in length");
    if (std::set<int>(row.columns.begin(), row.columns.end()).size() != row.columns.size())
      throw InvalidInput(where + " repeats a column");
    for (double v : row.phi) {
      if (!std::isfinite(v) || v <= 0.0) throw InvalidInput(where + ": phi must be positive");
      min_phi = std::min(min_phi, v);
    }
  }
  for (Eigen::Index i = 0; i < psi_.size(); ++i)
    if (!std::isfinite(psi_(i)) || psi_(i) <= 0.0) throw InvalidInput("carpet: psi must be positive");
  const double max_psi = psi_.maxCoeff();
  if (min_phi < max_psi)
    throw InvalidInput("carpet: domination fails (min phi < max psi)");
  if (min_phi - max_psi <= 1e-12 * max_psi)
    warnings_.emplace_back("domination holds only with equality (min phi = max psi)");
}

std::size_t CarpetSystem::rectangle_count() const {
  std::size_t count = 0;
  for (const auto& r : rows_) count += r.columns.size();
  return count;
}

CarpetSystem mcmullen_carpet(int l, int m, std::span<const int> row_counts) {
  if (!(l > m && m > 1)) throw InvalidInput("McMullen carpet needs integers l > m > 1");
  if (row_counts.size() != static_cast<std::size_t>(m))
    throw InvalidInput("McMullen carpet needs one rectangle count per row (m of them)");
  std::vector<CarpetRow> rows;
  for (int r : row_counts) {
    if (r < 0 || r > l) throw InvalidInput("McMullen row counts must lie in [0, l]");
    if (r == 0) continue;
    CarpetRow row;
    for (int j = 0; j < r; ++j) {
      row.columns.push_back(j);
      row.phi.push_back(std::log(static_cast<double>(l)));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidInput("McMullen carpet needs at least one rectangle");
  const std::size_t k = rows.size();
  return CarpetSystem(ShiftSpace::full(k), std::move(rows),
                      Eigen::VectorXd::Constant(static_cast<Eigen::Index>(k),
                                                std::log(static_cast<double>(m))));
}

// ---------------------------------------------------------------------------
// Fiber quantities

FiberPressure fiber_pressure(const CarpetSystem& system, double t) {
  if (!(t >= 0.0)) throw InvalidInput("fiber_pressure: t must be nonnegative");
  FiberPressure fp{t, Eigen::VectorXd(static_cast<Eigen::Index>(system.row_count()))};
  for (std::size_t i = 0; i < system.row_count(); ++i)
    fp.log_A(static_cast<Eigen::Index>(i)) = log_sum_exp(system.rows()[i].phi, t);
  return fp;
}

std::vector<Eigen::VectorXd> canonical_fiber_weights(const CarpetSystem& system, double t) {
  std::vector<Eigen::VectorXd> weights;
  weights.reserve(system.row_count());
  for (const auto& row : system.rows()) {
    const double log_a = log_sum_exp(row.phi, t);
    Eigen::VectorXd w(static_cast<Eigen::Index>(row.phi.size()));
    for (std::size_t j = 0; j < row.phi.size(); ++j)
      w(static_cast<Eigen::Index>(j)) = std::exp(-t * row.phi[j] - log_a);
    w /= w.sum();
    weights.push_back(std::move(w));
  }
  return weights;
}

double t_of_nu(const CarpetSystem& system, const MarkovMeasure& nu, double residual_tol) {
  if (nu.symbol_count() != system.row_count())
    throw InvalidInput("t_of_nu: measure is not on the base alphabet");
  const Eigen::VectorXd& p = nu.stationary();
  auto gauge = [&](double t) { return p.dot(fiber_pressure(system, t).log_A); };
  return decreasing_root_from_zero(gauge, residual_tol);
}

TRange t_extremes(const CarpetSystem& system) {
  const ShiftSpace& base = system.base();
  auto top = [&](double t) { return maximum_mean_cycle(base, fiber_pressure(system, t).log_A).mean; };
  auto bottom = [&](double t) {
    return minimum_mean_cycle(base, fiber_pressure(system, t).log_A).mean;
  };
  TRange range;
  range.upper = decreasing_root_from_zero(top, 1e-15);
  range.lower = decreasing_root_from_zero(bottom, 1e-15);
  range.lower = std::min(range.lower, range.upper);
  range.upper_cycle = maximum_mean_cycle(base, fiber_pressure(system, range.upper).log_A).cycle;
  range.lower_cycle = minimum_mean_cycle(base, fiber_pressure(system, range.lower).log_A).cycle;
  return range;
}

double bowen_root(const ShiftSpace& space, const Eigen::VectorXd& psi) {
  if ((psi.array() <= 0.0).any()) throw InvalidInput("bowen_root: psi must be positive");
  return decreasing_root_from_zero([&](double s) { return pressure(space, Eigen::VectorXd(-s * psi)); },
                                   1e-14);
}

double measure_dimension(const CarpetSystem& system, const MarkovMeasure& nu) {
  if (!nu.compatible_with(system.base()))
    throw InvalidInput("measure_dimension: measure is not compatible with the base shift");
  return measure_entropy(nu) / integrate(system.psi(), nu) + t_of_nu(system, nu);
}

double ly_dimension(const CarpetSystem& system, const MarkovMeasure& mu_row,
                    const std::vector<Eigen::VectorXd>& fiber_weights) {
  if (!mu_row.compatible_with(system.base()))
    throw InvalidInput("ly_dimension: row measure is not compatible with the base shift");
  check_fiber_weights(system, fiber_weights);
  const Eigen::VectorXd& p = mu_row.stationary();
  const double h_nu = measure_entropy(mu_row);
  double fiber_entropy = 0.0;
  double int_phi = 0.0;
  for (std::size_t i = 0; i < system.row_count(); ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    const auto& w = fiber_weights[i];
    const auto& phi = system.rows()[i].phi;
    fiber_entropy += p(idx) * row_entropy(w);
    for (std::size_t j = 0; j < phi.size(); ++j)
      int_phi += p(idx) * w(static_cast<Eigen::Index>(j)) * phi[j];
  }
  return h_nu / integrate(system.psi(), mu_row) + fiber_entropy / int_phi;
}

ShiftSpace total_space(const CarpetSystem& system) {
  const auto n = static_cast<Eigen::Index>(system.rectangle_count());
  Eigen::MatrixXi t(n, n);
  Eigen::Index r = 0;
  for (std::size_t i = 0; i < system.row_count(); ++i) {
    for (std::size_t j = 0; j < system.rows()[i].columns.size(); ++j, ++r) {
      Eigen::Index c = 0;
      for (std::size_t i2 = 0; i2 < system.row_count(); ++i2)
        for (std::size_t j2 = 0; j2 < system.rows()[i2].columns.size(); ++j2, ++c)
          t(r, c) = system.base().allowed(static_cast<Symbol>(i), static_cast<Symbol>(i2)) ? 1 : 0;
    }
  }
  return ShiftSpace(std::move(t));
}

MarkovMeasure lift_product_measure(const CarpetSystem& system, const MarkovMeasure& mu_row,
                                   const std::vector<Eigen::VectorXd>& fiber_weights) {
  check_fiber_weights(system, fiber_weights);
  const auto n = static_cast<Eigen::Index>(system.rectangle_count());
  std::vector<std::pair<Eigen::Index, Eigen::Index>> owner;  // (row, position)
  for (std::size_t i = 0; i < system.row_count(); ++i)
    for (std::size_t j = 0; j < system.rows()[i].columns.size(); ++j)
      owner.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  Eigen::MatrixXd q(n, n);
  Eigen::VectorXd p(n);
  for (Eigen::Index a = 0; a < n; ++a) {
    const auto [row, pos] = owner[static_cast<std::size_t>(a)];
    p(a) = mu_row.stationary()(row) * fiber_weights[static_cast<std::size_t>(row)](pos);
    for (Eigen::Index b = 0; b < n; ++b) {
      const auto [row2, pos2] = owner[static_cast<std::size_t>(b)];
      q(a, b) = mu_row.stochastic()(row, row2) * fiber_weights[static_cast<std::size_t>(row2)](pos2);
    }
  }
  return MarkovMeasure(std::move(q), std::move(p));
}

const char* to_string(EndpointCase c) {
  switch (c) {
    case EndpointCase::interior: return "interior";
    case EndpointCase::lower_endpoint: return "lower_endpoint";
    case EndpointCase::upper_endpoint: return "upper_endpoint";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Full-dimension solver

namespace {

struct InnerValue {
  bool feasible = false;
  double beta = kNaN;
  double h = -kInf;
};

struct ScanResult {
  std::vector<TracePoint> grid;
  double t = kNaN;
  double beta = kNaN;
  double h = -kInf;
};

class FullDimensionSolver {
 public:
  FullDimensionSolver(const CarpetSystem& system, const CarpetOptions& options)
      : system_(system), options_(options) {}

  FullDimensionReport solve();

 private:
  /// sup { h_nu + (t - D) int psi : int log A_t dnu = 0 }, via the Gibbs
  /// state of (t - D) psi + beta log A_t with the constraint as level set.
  LevelSetSolution inner_solution(double D, double t, double warm_beta) const {
    const Eigen::VectorXd log_a = fiber_pressure(system_, t).log_A;
    LevelSetOptions level = options_.level_set;
    level.initial_center = std::isfinite(warm_beta) ? warm_beta : 0.0;
    // The constraint is only as well resolved as the spread of log A_t.
    const BirkhoffRange spread = birkhoff_range(system_.base(), log_a);
    const double floor = 8.0 * detail::kEpsilon * std::max(1.0, log_a.cwiseAbs().maxCoeff());
    level.residual_tol = std::max(floor, level.residual_tol * std::min(1.0, spread.upper - spread.lower));
    return solve_beta(system_.base(), Eigen::VectorXd((t - D) * system_.psi()), log_a, 0.0, level);
  }

  InnerValue inner(double D, double t, double warm_beta) const {
    try {
      const LevelSetSolution s = inner_solution(D, t, warm_beta);
      return {true, s.beta, s.pressure_K_alpha};
    } catch (const DomainRejection&) {
      return {};
    } catch (const ConvergenceFailure&) {
      return {};
    }
  }

  ScanResult scan(double D) const;
  std::optional<DimensionCandidate> critical_candidate(double t_end, bool upper) const;
  DimensionCandidate candidate_from(std::string source, MarkovMeasure nu, double beta) const {
    const double t = t_of_nu(system_, nu, options_.t_residual);
    const double d = measure_entropy(nu) / integrate(system_.psi(), nu) + t;
    return {std::move(source), d, t, beta, std::move(nu)};
  }

  const CarpetSystem& system_;
  const CarpetOptions& options_;
  double t_lower_ = 0.0;
  double t_upper_ = 0.0;
};

ScanResult FullDimensionSolver::scan(double D) const {
  const std::size_t n = std::max<std::size_t>(options_.t_grid, 1);
  const double width = t_upper_ - t_lower_;
  ScanResult result;
  result.grid.resize(n);
  for (std::size_t k = 0; k < n; ++k)
    result.grid[k].t = t_lower_ + width * static_cast<double>(k + 1) / static_cast<double>(n + 1);

  // Fixed-size blocks warm-start beta along t; block boundaries do not depend
  // on the thread count, so the scan is schedule independent.
  const std::size_t blocks = (n + kScanBlock - 1) / kScanBlock;
  detail::parallel_for(blocks, options_.threads, [&](std::size_t b) {
    double warm = 0.0;
    for (std::size_t k = b * kScanBlock; k < std::min(n, (b + 1) * kScanBlock); ++k) {
      const InnerValue v = inner(D, result.grid[k].t, warm);
      result.grid[k].feasible = v.feasible;
      result.grid[k].beta = v.beta;
      result.grid[k].h = v.h;
      if (v.feasible) warm = v.beta;
    }
  });

  std::size_t best = n;
  for (std::size_t k = 0; k < n; ++k)
    if (result.grid[k].feasible && (best == n || result.grid[k].h > result.grid[best].h)) best = k;
  if (best == n) return result;
  result.t = result.grid[best].t;
  result.beta = result.grid[best].beta;
  result.h = result.grid[best].h;

  // Golden-section refinement between the neighbours of the best grid point.
  const double margin = std::min(0.5 * options_.endpoint_tol, width / (4.0 * static_cast<double>(n + 1)));
  double a = best == 0 ? t_lower_ + margin : result.grid[best - 1].t;
  double c = best + 1 == n ? t_upper_ - margin : result.grid[best + 1].t;
  double warm = result.beta;
  auto value = [&](double t) {
    const InnerValue v = inner(D, t, warm);
    if (v.feasible) {
      warm = v.beta;
      if (v.h > result.h) {
        result.t = t;
        result.beta = v.beta;
        result.h = v.h;
      }
    }
    return v.h;
  };
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = c - kInvPhi * (c - a);
  double x2 = a + kInvPhi * (c - a);
  double f1 = value(x1);
  double f2 = value(x2);
  while (c - a > options_.t_refine_tol) {
    if (f1 >= f2) {
      c = x2;
      x2 = x1;
      f2 = f1;
      x1 = c - kInvPhi * (c - a);
      f1 = value(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (c - a);
      f2 = value(x2);
    }
  }
  return result;
}

std::optional<DimensionCandidate> FullDimensionSolver::critical_candidate(double t_end,
                                                                          bool upper) const {
  const ShiftSpace& base = system_.base();
  const Eigen::VectorXd log_a = fiber_pressure(system_, t_end).log_A;
  const MeanCycle extreme = upper ? maximum_mean_cycle(base, log_a) : minimum_mean_cycle(base, log_a);
  const Eigen::MatrixXi edges = critical_edges(base, log_a, extreme.mean, upper, 1e-9);
  std::optional<DimensionCandidate> best;
  for (const auto& component : cyclic_components(edges)) {
    // Largest h / int psi among measures carried by this component.
    auto component_pressure = [&](double s) {
      return component_gibbs(base, edges, component, Eigen::VectorXd(-s * system_.psi())).pressure;
    };
    const double s = decreasing_root_from_zero(component_pressure, 1e-14);
    MarkovMeasure nu =
        component_gibbs(base, edges, component, Eigen::VectorXd(-s * system_.psi())).measure;
    DimensionCandidate cand = candidate_from(upper ? "upper_critical" : "lower_critical",
                                             std::move(nu), upper ? kInf : -kInf);
    if (!best || cand.D > best->D) best = std::move(cand);
  }
  return best;
}

FullDimensionReport FullDimensionSolver::solve() {
  const ShiftSpace& base = system_.base();
  const Eigen::VectorXd& psi = system_.psi();
  require_mixing(base, "solve_full_dimension");
  std::vector<std::string> warnings = system_.warnings();

  const TRange range = t_extremes(system_);
  t_lower_ = range.lower;
  t_upper_ = range.upper;
  if (t_upper_ > 1.0)
    warnings.emplace_back("t_upper exceeds 1; the fiber contribution is not a dimension here");
  const bool degenerate = t_upper_ - t_lower_ <= 1e-12 * std::max(1.0, t_upper_);

  // Every candidate is a base measure with its own value h / int psi + t(nu),
  // so each one is a lower bound for D and the largest is reported.
  const double s = bowen_root(base, psi);
  std::vector<DimensionCandidate> candidates;
  candidates.push_back(candidate_from("bowen", equilibrium(base, Eigen::VectorXd(-s * psi)).measure, 0.0));
  if (auto c = critical_candidate(t_lower_, false)) candidates.push_back(std::move(*c));
  if (auto c = critical_candidate(t_upper_, true)) candidates.push_back(std::move(*c));
  double d_end = -kInf;
  for (const auto& c : candidates) d_end = std::max(d_end, c.D);

  FullDimensionDiagnostics diag;
  diag.bowen_root = s;
  ScanResult final_scan;
  if (!degenerate) {
    auto sup_h = [&](double D) {
      ++diag.outer_evaluations;
      return scan(D).h;
    };
    final_scan = scan(d_end);
    ++diag.outer_evaluations;
    const double inner_tol = 0.1 * options_.outer_tol;
    if (final_scan.h > inner_tol) {
      // G(D) = sup_t h_D(t) is strictly decreasing in D and nonpositive at
      // the Bowen bound s + t_upper.
      double d_hi = s + t_upper_;
      double g_hi = sup_h(d_hi);
      for (int i = 0; i < 8 && g_hi > 0.0; ++i) {
        d_hi += std::max(d_hi - d_end, 1e-6);
        g_hi = sup_h(d_hi);
      }
      if (g_hi > 0.0) {
        std::ostringstream os;
        os.precision(15);
        os << "outer bracket failed: G(" << d_hi << ") = " << g_hi << " > 0 (endpoint value "
           << d_end << ", Bowen root " << s << "); interior search skipped";
        warnings.push_back(os.str());
      } else {
        auto increasing = [&](double D) { return -sup_h(D); };
        const detail::RootResult root = detail::bracketed_root(
            increasing, {d_end, -final_scan.h, d_hi, -g_hi}, inner_tol, 0.0);
        final_scan = scan(root.x);
        ++diag.outer_evaluations;
        if (std::isfinite(final_scan.h)) {
          LevelSetSolution sol = inner_solution(root.x, final_scan.t, final_scan.beta);
          candidates.push_back(candidate_from("interior", std::move(sol.maximizer.measure), sol.beta));
        }
      }
    }
  }
  diag.interior_sup = final_scan.h;

  // Ties go to the earlier source in this order.
  static const std::vector<std::string> preference{"interior", "bowen", "lower_critical", "upper_critical"};
  auto rank = [&](const DimensionCandidate& c) {
    return std::find(preference.begin(), preference.end(), c.source) - preference.begin();
  };
  std::size_t win = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double gap = candidates[i].D - candidates[win].D;
    if (gap > 1e-12 || (gap >= -1e-12 && rank(candidates[i]) < rank(candidates[win]))) win = i;
  }
  const DimensionCandidate& best = candidates[win];
  // With t_lower = t_upper, t(nu) is constant and the Bowen measure is optimal.
  const double D = degenerate ? s + t_upper_ : best.D;
  const double t_star = degenerate ? t_upper_ : best.t;
  const bool beta_finite = std::isfinite(best.beta);
  EndpointCase endpoint_case = EndpointCase::interior;
  if (best.source == "lower_critical" || t_star - t_lower_ < options_.endpoint_tol)
    endpoint_case = EndpointCase::lower_endpoint;
  else if (best.source == "upper_critical" || t_upper_ - t_star < options_.endpoint_tol)
    endpoint_case = EndpointCase::upper_endpoint;

  const Eigen::VectorXd log_a_star = fiber_pressure(system_, t_star).log_A;
  if (beta_finite)
    diag.pressure_residual =
        pressure(base, Eigen::VectorXd((t_star - D) * psi + best.beta * log_a_star));
  diag.constraint_residual = integrate(log_a_star, best.nu);
  diag.variational_residual = measure_entropy(best.nu) + (t_star - D) * integrate(psi, best.nu);
  diag.t_of_nu_star = t_of_nu(system_, best.nu, options_.t_residual);
  diag.dimension_of_nu_star = measure_dimension(system_, best.nu);

  FullDimensionReport report{
      .D = D,
      .t_star = t_star,
      .beta_star = beta_finite ? best.beta : kNaN,
      .beta_finite = beta_finite,
      .nu_star = best.nu,
      .fiber_weights = canonical_fiber_weights(system_, t_star),
      .endpoint_case = endpoint_case,
      .t_lower = t_lower_,
      .t_upper = t_upper_,
      .degenerate_t_range = degenerate,
      .diagnostics = std::move(diag),
      .trace = std::move(final_scan.grid),
      .warnings = std::move(warnings),
  };
  report.diagnostics.candidates = std::move(candidates);
  if (!beta_finite)
    report.warnings.emplace_back(std::string("beta* diverges at the ") + to_string(endpoint_case) +
                                 " (certificate measure reported)");
  return report;
}

}  // namespace

FullDimensionReport solve_full_dimension(const CarpetSystem& system, const CarpetOptions& options) {
  return FullDimensionSolver(system, options).solve();
}

}  // namespace fulldim
