#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include <Eigen/Dense>
#include <json.hpp>

#include "fulldim/carpet.hpp"
#include "fulldim/shift_space.hpp"

namespace fulldim {

enum class OracleMethod { mcmullen_closed_form, bernoulli_search, cycle_enumeration, grid_search };
const char* to_string(OracleMethod method);

struct OracleResult {
  double value = 0.0;
  OracleMethod method = OracleMethod::mcmullen_closed_form;
  /// Data from which `value` can be recomputed (weights, cycle, grid point).
  nlohmann::json certificate;
};

/// log_m sum_{r_i > 0} r_i^(log m / log l) for a carpet of (x, y) -> (l x, m y)
/// keeping r_i rectangles in row i. The certificate lists the optimal
/// Bernoulli weight of every rectangle (row-major, empty rows skipped).
OracleResult mcmullen_dimension(int l, int m, std::span<const int> row_counts);

struct BernoulliSearchOptions {
  std::size_t starts = 32;
  std::uint64_t seed = 0;
  double initial_step = 0.25;
  double shrink = 0.5;
  double min_step = 1e-10;
  std::size_t threads = 1;
};

/// Maximizes the Ledrappier-Young value over Bernoulli measures on the
/// rectangles (rows and columns independent) by multi-start compass search
/// on the simplex. Start 0 is uniform; the others are Dirichlet(1) draws.
OracleResult bernoulli_search(const CarpetSystem& system, const BernoulliSearchOptions& options = {});

/// Bernoulli objective for one weight vector over the rectangles.
double bernoulli_objective(const CarpetSystem& system, const Eigen::VectorXd& weights);

struct CycleExtremes {
  OracleResult lower;
  OracleResult upper;
  std::size_t cycles = 0;
};

/// Minimum and maximum mean of psi over all simple cycles of length at most
/// max_len (<= 20). Throws DomainRejection beyond `guard` cycles.
CycleExtremes cycle_enumeration(const ShiftSpace& space, const Eigen::VectorXd& psi,
                                std::size_t max_len, std::size_t guard = 5'000'000);
CycleExtremes cycle_enumeration(const ShiftSpace& space, const Potential& psi, std::size_t max_len,
                                std::size_t guard = 5'000'000);

/// Best h_mu + int phi dmu over Markov measures on a grid of stochastic
/// matrices (spacing 1/resolution), restricted to int psi dmu = alpha. One
/// free parameter per grid point is solved for, so every candidate satisfies
/// the constraint to rounding and the value is a lower bound.
/// Requires at most 3 symbols and resolution <= 200.
OracleResult constrained_grid_search(const ShiftSpace& space, const Eigen::VectorXd& phi,
                                     const Eigen::VectorXd& psi, double alpha,
                                     std::size_t resolution = 200);

/// h_mu + int phi dmu for the measure stored in a grid-search certificate.
double grid_certificate_value(const nlohmann::json& certificate, const Eigen::VectorXd& phi);

}  // namespace fulldim
