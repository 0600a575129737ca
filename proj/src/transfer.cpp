#include "fulldim/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fulldim/errors.hpp"

namespace fulldim {

namespace {

Eigen::VectorXd power_iterate(const Eigen::MatrixXd& m, const PerronOptions& options,
                              double& eigenvalue, std::size_t& iterations) {
  const Eigen::Index n = m.rows();
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
  const double floor = 4.0 * std::numeric_limits<double>::epsilon();
  std::size_t reached = 0, stalls = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t it = 1; it <= options.max_iterations; ++it) {
    Eigen::VectorXd w = m * v;
    const double lambda = w.maxCoeff();
    if (!(lambda > 0.0) || !std::isfinite(lambda))
      throw ConvergenceFailure("power iteration: iterate vanished or overflowed");
    const double residual = (w - lambda * v).cwiseAbs().maxCoeff() / lambda;
    if (reached == 0 && residual < options.residual_tol) reached = it;
    if (reached != 0) {
      // Polish to rounding level; bounded by the work already spent.
      if (residual < best) {
        best = residual;
        stalls = 0;
      } else {
        ++stalls;
      }
      if (residual <= floor || stalls >= 3 || it >= 2 * reached + 8) {
        eigenvalue = lambda;
        iterations = it;
        return v;
      }
    }
    v = w / lambda;
  }
  throw ConvergenceFailure("power iteration did not reach residual " +
                           std::to_string(options.residual_tol) + " in " +
                           std::to_string(options.max_iterations) + " steps");
}

void require_depth_one(const ShiftSpace& space, const Eigen::VectorXd& phi) {
  if (static_cast<std::size_t>(phi.size()) != space.symbol_count())
    throw InvalidInput("potential needs one value per symbol");
  if (!phi.allFinite()) throw InvalidInput("potential values must be finite");
}

}  // namespace

PerronData perron_data(const Eigen::MatrixXd& matrix, const PerronOptions& options) {
  if (matrix.rows() == 0 || matrix.rows() != matrix.cols())
    throw InvalidInput("Perron data needs a square non-empty matrix");
  if ((matrix.array() < 0.0).any()) throw InvalidInput("Perron data needs a nonnegative matrix");
  PerronData d;
  std::size_t left_iterations = 0;
  double left_eigenvalue = 0.0;
  d.right = power_iterate(matrix, options, d.eigenvalue, d.iterations);
  d.left = power_iterate(matrix.transpose(), options, left_eigenvalue, left_iterations);
  d.iterations = std::max(d.iterations, left_iterations);
  return d;
}

TransferMatrix::TransferMatrix(const ShiftSpace& space, const Eigen::VectorXd& symbol_values) {
  require_depth_one(space, symbol_values);
  log_scale_ = symbol_values.maxCoeff();
  const Eigen::VectorXd weight = (symbol_values.array() - log_scale_).exp();
  entries_ = space.transitions().cast<double>();
  for (Eigen::Index a = 0; a < entries_.rows(); ++a) entries_.row(a) *= weight(a);
}

double pressure(const ShiftSpace& space, const Eigen::VectorXd& phi, const PerronOptions& options) {
  require_mixing(space, "pressure");
  const TransferMatrix b(space, phi);
  double lambda = 0.0;
  std::size_t iterations = 0;
  power_iterate(b.entries(), options, lambda, iterations);
  return std::log(lambda) + b.log_scale();
}

double pressure(const ShiftSpace& space, const Potential& phi, const PerronOptions& options) {
  if (phi.depth() == 1) {
    if (!phi.compatible_with(space)) throw InvalidInput("potential does not match the shift");
    return pressure(space, phi.symbol_values(), options);
  }
  const HigherBlock recoded = higher_block(space, phi);
  return pressure(recoded.space, recoded.potential.symbol_values(), options);
}

EquilibriumReport equilibrium(const ShiftSpace& space, const Eigen::VectorXd& phi,
                              const PerronOptions& options) {
  require_mixing(space, "equilibrium");
  const TransferMatrix b(space, phi);
  PerronData perron = perron_data(b.entries(), options);
  const double lambda = perron.eigenvalue;
  Eigen::VectorXd& u = perron.left;
  Eigen::VectorXd& v = perron.right;
  if ((v.array() <= 0.0).any() || (u.array() <= 0.0).any())
    throw ConvergenceFailure("equilibrium: Perron vectors are not strictly positive");

  const Eigen::Index n = b.entries().rows();
  Eigen::MatrixXd q(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index c = 0; c < n; ++c) q(a, c) = b.entries()(a, c) * v(c) / (lambda * v(a));
    q.row(a) /= q.row(a).sum();
  }
  Eigen::VectorXd p = u.cwiseProduct(v);
  p /= p.sum();

  v /= v.sum();
  u /= u.dot(v);

  EquilibriumReport report{
      .pressure = std::log(lambda) + b.log_scale(),
      .measure = MarkovMeasure(std::move(q), std::move(p)),
      .entropy = 0.0,
      .integral_phi = 0.0,
      .left_eigvec = {},
      .right_eigvec = {},
  };
  report.entropy = measure_entropy(report.measure);
  report.integral_phi = integrate(phi, report.measure);

  // ratio(a, b) = lambda u(a) v(b) exp(-phi(b)) / (u . v) for words a ... b,
  // in the rescaled units where phi has had log_scale removed.
  const Eigen::VectorXd tail =
      v.cwiseProduct((-(phi.array() - b.log_scale())).exp().matrix());
  report.gibbs_lower = lambda * u.minCoeff() * tail.minCoeff();
  report.gibbs_upper = lambda * u.maxCoeff() * tail.maxCoeff();
  report.left_eigvec = std::move(u);
  report.right_eigvec = std::move(v);
  return report;
}

EquilibriumReport equilibrium(const ShiftSpace& space, const Potential& phi,
                              const PerronOptions& options) {
  if (!phi.compatible_with(space)) throw InvalidInput("potential does not match the shift");
  return equilibrium(space, phi.symbol_values(), options);
}

GibbsRatioResult gibbs_ratio_check(const EquilibriumReport& report, const ShiftSpace& space,
                                   const Potential& phi, std::size_t max_len, std::size_t guard) {
  if (max_len == 0) throw InvalidInput("gibbs_ratio_check: max_len must be positive");
  if (!report.measure.compatible_with(space))
    throw InvalidInput("gibbs_ratio_check: report does not belong to this shift");
  const Eigen::VectorXd values = phi.symbol_values();

  // Count words before enumerating.
  const Eigen::MatrixXd t = space.transitions().cast<double>();
  Eigen::VectorXd paths = Eigen::VectorXd::Ones(t.rows());
  double total = 0.0;
  for (std::size_t len = 1; len <= max_len; ++len) {
    total += paths.sum();
    if (total > static_cast<double>(guard))
      throw DomainRejection("gibbs_ratio_check: more than " + std::to_string(guard) +
                            " cylinders to enumerate");
    paths = t * paths;
  }

  const auto n = static_cast<Symbol>(space.symbol_count());
  const auto& q = report.measure.stochastic();
  const auto& p = report.measure.stationary();
  const double pressure_value = report.pressure;
  GibbsRatioResult result;
  result.per_length.assign(max_len, {std::numeric_limits<double>::infinity(),
                                     -std::numeric_limits<double>::infinity()});

  // Depth-first walk carrying log mu[w] - S_n phi(w).
  struct Frame {
    Symbol last;
    std::size_t length;
    double log_excess;
  };
  std::vector<Frame> stack;
  for (Symbol a = 0; a < n; ++a)
    stack.push_back({a, 1, std::log(p(a)) - values(a)});
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    const double ratio = std::exp(f.log_excess + pressure_value * static_cast<double>(f.length));
    auto& [lo, hi] = result.per_length[f.length - 1];
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    ++result.cylinders;
    if (f.length == max_len) continue;
    for (Symbol c = 0; c < n; ++c) {
      if (!space.allowed(f.last, c)) continue;
      stack.push_back({c, f.length + 1, f.log_excess + std::log(q(f.last, c)) - values(c)});
    }
  }
  result.min_ratio = std::numeric_limits<double>::infinity();
  result.max_ratio = -std::numeric_limits<double>::infinity();
  for (const auto& [lo, hi] : result.per_length) {
    result.min_ratio = std::min(result.min_ratio, lo);
    result.max_ratio = std::max(result.max_ratio, hi);
  }
  return result;
}

double second_eigenvalue_modulus(const MarkovMeasure& measure) {
  const auto& q = measure.stochastic();
  const auto& p = measure.stationary();
  const Eigen::Index n = q.rows();
  // E = Q - 1 p^T annihilates constants and leaves the rest of the spectrum.
  const Eigen::MatrixXd deflated = q - Eigen::VectorXd::Ones(n) * p.transpose();
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = std::sin(1.7 * static_cast<double>(i) + 0.3) + 0.5;
  constexpr int kHalf = 400;
  double log_norm = 0.0;
  double log_norm_half = 0.0;
  for (int k = 1; k <= 2 * kHalf; ++k) {
    x = deflated * x;
    const double norm = x.cwiseAbs().maxCoeff();
    if (norm == 0.0 || !std::isfinite(norm)) return 0.0;
    log_norm += std::log(norm);
    x /= norm;
    if (k == kHalf) log_norm_half = log_norm;
  }
  return std::exp((log_norm - log_norm_half) / kHalf);
}

QFormEstimate q_form(const ShiftSpace& space, const Potential& h_base, const Potential& h1,
                     const Potential& h2, std::size_t truncation) {
  if (truncation < 1) throw InvalidInput("q_form: truncation must be at least 1");
  if (!h1.compatible_with(space) || !h2.compatible_with(space))
    throw InvalidInput("q_form: potentials do not match the shift");
  const EquilibriumReport base = equilibrium(space, h_base);
  const auto& q = base.measure.stochastic();
  const auto& p = base.measure.stationary();
  const Eigen::VectorXd f = p.cwiseProduct(h1.symbol_values());
  Eigen::VectorXd g = h2.symbol_values();
  const double mean_product = p.dot(h1.symbol_values()) * p.dot(g);

  double sum = 0.0;
  Eigen::VectorXd previous_centered;
  for (std::size_t lag = 0; lag <= truncation; ++lag) {
    if (lag > 0) g = q * g;
    sum += f.dot(g) - mean_product;
    if (lag + 1 == truncation) previous_centered = g.array() - p.dot(g);
  }
  const Eigen::VectorXd centered = g.array() - p.dot(g);

  double rate = second_eigenvalue_modulus(base.measure);
  const double prev = previous_centered.size() ? previous_centered.cwiseAbs().maxCoeff() : 0.0;
  const double last = centered.cwiseAbs().maxCoeff();
  if (prev > 0.0) rate = std::max(rate, last / prev);
  double tail = 0.0;
  if (last > 0.0) {
    tail = rate >= 1.0 ? std::numeric_limits<double>::infinity()
                       : f.cwiseAbs().sum() * last * rate / (1.0 - rate);
  }
  return {sum, truncation, tail};
}

}  // namespace fulldim
