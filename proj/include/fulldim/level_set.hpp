#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fulldim/errors.hpp"
#include "fulldim/shift_space.hpp"
#include "fulldim/transfer.hpp"

namespace fulldim {

/// Closure of the interval of values of int psi dmu over invariant measures,
/// with the periodic orbits that attain each end.
struct BirkhoffRange {
  double lower = 0.0;
  double upper = 0.0;
  Word lower_cycle;
  Word upper_cycle;

  bool degenerate(double tol = 1e-12) const;
};

/// Extreme cycle means of a depth-1 psi; these are the infimum and supremum
/// of int psi dmu over all shift-invariant measures.
BirkhoffRange birkhoff_range(const ShiftSpace& space, const Potential& psi);
BirkhoffRange birkhoff_range(const ShiftSpace& space, const Eigen::VectorXd& psi);

struct LevelSetOptions {
  /// Levels closer than this to an end of the Birkhoff range are rejected.
  double interior_margin = 1e-9;
  /// Target for |int psi dmu_beta - alpha|.
  double residual_tol = 1e-10;
  double degenerate_tol = 1e-12;
  /// Starting bracket [center - half_width, center + half_width] for beta.
  double initial_center = 0.0;
  double initial_half_width = 1.0;
  PerronOptions perron;
};

struct LevelSetSolution {
  double alpha = 0.0;
  double beta = 0.0;
  /// Pressure of phi on the level set {Birkhoff average of psi = alpha}.
  double pressure_K_alpha = 0.0;
  /// Gibbs state of phi + beta psi.
  EquilibriumReport maximizer;
  std::vector<std::string> warnings;
};

class LevelSetRejection : public DomainRejection {
 public:
  enum class Reason { outside_range, on_boundary, degenerate_range };

  LevelSetRejection(Reason reason, double alpha, BirkhoffRange range);

  Reason reason() const { return reason_; }
  double alpha() const { return alpha_; }
  const BirkhoffRange& range() const { return range_; }

 private:
  Reason reason_;
  double alpha_;
  BirkhoffRange range_;
};

const char* to_string(LevelSetRejection::Reason reason);

/// Finds the unique beta with int psi d(mu_{phi + beta psi}) = alpha and the
/// resulting level-set pressure P(phi + beta psi) - beta alpha.
/// Throws LevelSetRejection unless alpha is interior to a non-degenerate range.
LevelSetSolution solve_beta(const ShiftSpace& space, const Potential& phi, const Potential& psi,
                            double alpha, const LevelSetOptions& options = {});
LevelSetSolution solve_beta(const ShiftSpace& space, const Eigen::VectorXd& phi,
                            const Eigen::VectorXd& psi, double alpha,
                            const LevelSetOptions& options = {});

struct SpectrumEntry {
  double alpha = 0.0;
  std::optional<LevelSetSolution> solution;
  /// Set when this grid point was rejected or failed.
  std::string error;
};

/// solve_beta at every grid point; failures are reported per entry.
/// Grid points are independent, so `threads` does not affect the results.
std::vector<SpectrumEntry> levelset_spectrum(const ShiftSpace& space, const Potential& phi,
                                             const Potential& psi, std::span<const double> grid,
                                             const LevelSetOptions& options = {},
                                             std::size_t threads = 1);

/// Largest amount by which a solved point lies below the chord through its
/// solved neighbours (0 for a concave profile).
double concavity_defect(std::span<const SpectrumEntry> entries);

}  // namespace fulldim
