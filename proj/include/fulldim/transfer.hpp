#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fulldim/shift_space.hpp"

namespace fulldim {

struct PerronOptions {
  /// Relative eigen-residual |Mv - lambda v|_inf / lambda that counts as
  /// converged. Iteration then continues while the residual still improves.
  double residual_tol = 1e-12;
  std::size_t max_iterations = 1'000'000;
};

struct PerronData {
  double eigenvalue = 0.0;
  Eigen::VectorXd left;
  Eigen::VectorXd right;
  std::size_t iterations = 0;
};

/// Perron root and eigenvectors of a nonnegative primitive matrix by power
/// iteration from the all-ones vector. Throws ConvergenceFailure after
/// `max_iterations` steps.
PerronData perron_data(const Eigen::MatrixXd& matrix, const PerronOptions& options = {});

/// Weighted transition matrix B(a,b) = transitions(a,b) * exp(phi(a)) for a
/// depth-1 potential. Stored as exp(log_scale) * entries with
/// log_scale = max phi so that large potentials do not overflow.
class TransferMatrix {
 public:
  TransferMatrix(const ShiftSpace& space, const Eigen::VectorXd& symbol_values);

  const Eigen::MatrixXd& entries() const { return entries_; }
  double log_scale() const { return log_scale_; }

 private:
  Eigen::MatrixXd entries_;
  double log_scale_ = 0.0;
};

struct EquilibriumReport {
  double pressure = 0.0;
  MarkovMeasure measure;
  double entropy = 0.0;
  double integral_phi = 0.0;
  /// Normalized so that sum(right) = 1 and left . right = 1.
  Eigen::VectorXd left_eigvec;
  Eigen::VectorXd right_eigvec;
  /// Sharp bounds for mu[w] / exp(-P n + S_n phi(w)) over all cylinders.
  double gibbs_lower = 0.0;
  double gibbs_upper = 0.0;
};

/// Topological pressure: log of the Perron root of the transfer matrix.
/// Potentials of depth k > 1 are recoded to the k-block shift first.
double pressure(const ShiftSpace& space, const Potential& phi, const PerronOptions& options = {});
double pressure(const ShiftSpace& space, const Eigen::VectorXd& phi,
                const PerronOptions& options = {});

/// Equilibrium (Gibbs) state of a depth-1 potential as a Markov measure.
EquilibriumReport equilibrium(const ShiftSpace& space, const Potential& phi,
                              const PerronOptions& options = {});
EquilibriumReport equilibrium(const ShiftSpace& space, const Eigen::VectorXd& phi,
                              const PerronOptions& options = {});

struct GibbsRatioResult {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  /// (min, max) of the ratio over cylinders of length 1, 2, ..., max_len.
  std::vector<std::pair<double, double>> per_length;
  std::size_t cylinders = 0;
};

/// Exhaustive check of mu[w] / exp(-P n + S_n phi(w)) over every allowed word
/// of length 1..max_len. Throws DomainRejection if more than `guard` words
/// would be enumerated.
GibbsRatioResult gibbs_ratio_check(const EquilibriumReport& report, const ShiftSpace& space,
                                   const Potential& phi, std::size_t max_len,
                                   std::size_t guard = 1'000'000);

struct QFormEstimate {
  double value = 0.0;
  std::size_t truncation_n = 0;
  double tail_bound = 0.0;
};

/// Partial sum over lags n = 0..truncation of
///   int h1 (h2 o T^n) dmu - int h1 dmu int h2 dmu
/// under the equilibrium state mu of h_base, with a geometric tail estimate
/// from the second eigenvalue of the Markov operator.
QFormEstimate q_form(const ShiftSpace& space, const Potential& h_base, const Potential& h1,
                     const Potential& h2, std::size_t truncation);

/// Modulus of the second eigenvalue of a Markov operator, estimated by power
/// iteration on the operator with its Perron projection removed.
double second_eigenvalue_modulus(const MarkovMeasure& measure);

}  // namespace fulldim
