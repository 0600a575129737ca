#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fulldim/level_set.hpp"
#include "fulldim/shift_space.hpp"
#include "fulldim/transfer.hpp"

namespace fulldim {

/// Rectangles available in one row: column labels and the fiber
/// log-expansion phi of each rectangle.
struct CarpetRow {
  std::vector<int> columns;
  std::vector<double> phi;
};

/// Symbolic skew-product carpet. Rows follow the base shift; in every step
/// the column is chosen freely among the rectangles of the current row.
/// psi is the base log-expansion, one value per row.
class CarpetSystem {
 public:
  CarpetSystem(ShiftSpace base, std::vector<CarpetRow> rows, Eigen::VectorXd psi);

  const ShiftSpace& base() const { return base_; }
  const std::vector<CarpetRow>& rows() const { return rows_; }
  const Eigen::VectorXd& psi() const { return psi_; }
  std::size_t row_count() const { return rows_.size(); }
  std::size_t rectangle_count() const;

  /// Non-fatal remarks from validation (e.g. domination holds only with equality).
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  ShiftSpace base_;
  std::vector<CarpetRow> rows_;
  Eigen::VectorXd psi_;
  std::vector<std::string> warnings_;
};

/// General Sierpinski carpet of (x, y) -> (l x, m y): row i keeps
/// row_counts[i] rectangles. Empty rows are dropped from the base alphabet.
CarpetSystem mcmullen_carpet(int l, int m, std::span<const int> row_counts);

struct FiberPressure {
  double t = 0.0;
  /// log_A(i) = log sum_{j in C_i} exp(-t phi(j)).
  Eigen::VectorXd log_A;
};

FiberPressure fiber_pressure(const CarpetSystem& system, double t);

/// Per-row weights proportional to exp(-t phi(j)).
std::vector<Eigen::VectorXd> canonical_fiber_weights(const CarpetSystem& system, double t);

/// Unique zero of t -> sum_i nu(i) log_A(i; t).
double t_of_nu(const CarpetSystem& system, const MarkovMeasure& nu, double residual_tol = 1e-11);

struct TRange {
  double lower = 0.0;
  double upper = 0.0;
  /// Base cycles on which the extreme values are attained.
  Word lower_cycle;
  Word upper_cycle;
};

/// Infimum and supremum of t(nu) over invariant measures on the base.
TRange t_extremes(const CarpetSystem& system);

/// Root s of P(-s psi) = 0 on a mixing shift, for positive psi.
double bowen_root(const ShiftSpace& space, const Eigen::VectorXd& psi);

/// h_nu / int psi dnu + t(nu).
double measure_dimension(const CarpetSystem& system, const MarkovMeasure& nu);

/// Ledrappier-Young value for the product measure (rows Markov by mu_row,
/// columns drawn independently from fiber_weights[i] in row i).
double ly_dimension(const CarpetSystem& system, const MarkovMeasure& mu_row,
                    const std::vector<Eigen::VectorXd>& fiber_weights);

/// Shift on rectangles: (i, j) -> (i', j') allowed iff i -> i' in the base.
/// Rectangle index = offset of row i + position of j within the row.
ShiftSpace total_space(const CarpetSystem& system);

/// The product measure of ly_dimension as a Markov measure on total_space.
MarkovMeasure lift_product_measure(const CarpetSystem& system, const MarkovMeasure& mu_row,
                                   const std::vector<Eigen::VectorXd>& fiber_weights);

enum class EndpointCase { interior, lower_endpoint, upper_endpoint };
const char* to_string(EndpointCase c);

struct CarpetOptions {
  std::size_t t_grid = 64;
  /// Golden-section stopping width in t.
  double t_refine_tol = 1e-10;
  /// Maxima closer than this to an end of [t_lower, t_upper] count as endpoint cases.
  double endpoint_tol = 1e-7;
  /// Target for |G(D)|.
  double outer_tol = 1e-9;
  double t_residual = 1e-11;
  std::size_t threads = 1;
  LevelSetOptions level_set;
};

struct TracePoint {
  double t = 0.0;
  double beta = std::numeric_limits<double>::quiet_NaN();
  double h = std::numeric_limits<double>::quiet_NaN();
  bool feasible = false;
};

/// A measure nu on the base with its dimension value h_nu / int psi + t(nu).
struct DimensionCandidate {
  std::string source;
  double D = 0.0;
  double t = 0.0;
  /// +/- infinity for the endpoint limits.
  double beta = 0.0;
  MarkovMeasure nu;
};

struct FullDimensionDiagnostics {
  /// int log A_{t*} dnu*.
  double constraint_residual = 0.0;
  /// h_nu* + (t* - D) int psi dnu*.
  double variational_residual = 0.0;
  /// P((t* - D) psi + beta* log A_{t*}); NaN when beta* is infinite.
  double pressure_residual = std::numeric_limits<double>::quiet_NaN();
  /// Supremum of h_D(t) over the interior scan at the reported D.
  double interior_sup = std::numeric_limits<double>::quiet_NaN();
  double bowen_root = 0.0;
  double t_of_nu_star = 0.0;
  double dimension_of_nu_star = 0.0;
  std::size_t outer_evaluations = 0;
  std::vector<DimensionCandidate> candidates;
};

struct FullDimensionReport {
  double D = 0.0;
  double t_star = 0.0;
  double beta_star = 0.0;
  bool beta_finite = true;
  MarkovMeasure nu_star;
  std::vector<Eigen::VectorXd> fiber_weights;
  EndpointCase endpoint_case = EndpointCase::interior;
  double t_lower = 0.0;
  double t_upper = 0.0;
  bool degenerate_t_range = false;
  FullDimensionDiagnostics diagnostics;
  /// The final inner scan over t at the reported D.
  std::vector<TracePoint> trace;
  std::vector<std::string> warnings;
};

/// Supremum of the dimension functional over invariant measures of the
/// carpet, together with an ergodic base measure attaining it.
FullDimensionReport solve_full_dimension(const CarpetSystem& system,
                                         const CarpetOptions& options = {});

}  // namespace fulldim
