#include "fulldim/level_set.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fulldim/cycles.hpp"
#include "fulldim/detail/parallel.hpp"
#include "fulldim/detail/root_finding.hpp"

namespace fulldim {

bool BirkhoffRange::degenerate(double tol) const {
  return upper - lower <= tol * std::max(1.0, std::max(std::abs(lower), std::abs(upper)));
}

BirkhoffRange birkhoff_range(const ShiftSpace& space, const Eigen::VectorXd& psi) {
  if (static_cast<std::size_t>(psi.size()) != space.symbol_count())
    throw InvalidInput("birkhoff_range: psi needs one value per symbol");
  const MeanCycle low = minimum_mean_cycle(space, psi);
  const MeanCycle high = maximum_mean_cycle(space, psi);
  return {low.mean, std::max(low.mean, high.mean), low.cycle, high.cycle};
}

BirkhoffRange birkhoff_range(const ShiftSpace& space, const Potential& psi) {
  if (!psi.compatible_with(space)) throw InvalidInput("birkhoff_range: psi does not match the shift");
  return birkhoff_range(space, psi.symbol_values());
}

namespace {

std::string rejection_message(LevelSetRejection::Reason reason, double alpha,
                              const BirkhoffRange& range) {
  std::ostringstream os;
  os.precision(15);
  switch (reason) {
    case LevelSetRejection::Reason::degenerate_range:
      os << "Birkhoff range of psi is degenerate (" << range.lower
         << "); psi has constant cycle means";
      break;
    case LevelSetRejection::Reason::on_boundary:
      os << "alpha = " << alpha << " lies on the boundary of the Birkhoff range [" << range.lower
         << ", " << range.upper << "]";
      break;
    case LevelSetRejection::Reason::outside_range:
      os << "alpha = " << alpha << " lies outside the Birkhoff range [" << range.lower << ", "
         << range.upper << "]";
      break;
  }
  return os.str();
}

}  // namespace

LevelSetRejection::LevelSetRejection(Reason reason, double alpha, BirkhoffRange range)
    : DomainRejection(rejection_message(reason, alpha, range)),
      reason_(reason),
      alpha_(alpha),
      range_(std::move(range)) {}

const char* to_string(LevelSetRejection::Reason reason) {
  switch (reason) {
    case LevelSetRejection::Reason::outside_range: return "outside_range";
    case LevelSetRejection::Reason::on_boundary: return "on_boundary";
    case LevelSetRejection::Reason::degenerate_range: return "degenerate_range";
  }
  return "unknown";
}

LevelSetSolution solve_beta(const ShiftSpace& space, const Eigen::VectorXd& phi,
                            const Eigen::VectorXd& psi, double alpha,
                            const LevelSetOptions& options) {
  require_mixing(space, "solve_beta");
  if (static_cast<std::size_t>(phi.size()) != space.symbol_count())
    throw InvalidInput("solve_beta: phi needs one value per symbol");
  BirkhoffRange range = birkhoff_range(space, psi);
  using Reason = LevelSetRejection::Reason;
  if (range.degenerate(options.degenerate_tol))
    throw LevelSetRejection(Reason::degenerate_range, alpha, std::move(range));
  const double margin = options.interior_margin;
  if (alpha < range.lower - margin || alpha > range.upper + margin)
    throw LevelSetRejection(Reason::outside_range, alpha, std::move(range));
  if (alpha <= range.lower + margin || alpha >= range.upper - margin)
    throw LevelSetRejection(Reason::on_boundary, alpha, std::move(range));

  // beta -> int psi d(mu_beta) is strictly increasing with limits at the ends
  // of the range, so doubling always finds a bracket.
  auto mean_gap = [&](double beta) {
    const EquilibriumReport eq = equilibrium(space, phi + beta * psi, options.perron);
    return integrate(psi, eq.measure) - alpha;
  };
  const detail::Bracket bracket =
      detail::expand_increasing(mean_gap, options.initial_center - options.initial_half_width,
                                options.initial_center + options.initial_half_width);
  const detail::RootResult root =
      detail::bracketed_root(mean_gap, bracket, options.residual_tol, 0.0);
  if (!root.residual_met) {
    std::ostringstream os;
    os << "solve_beta: residual " << root.fx << " above " << options.residual_tol << " at beta "
       << root.x;
    throw ConvergenceFailure(os.str());
  }

  EquilibriumReport maximizer = equilibrium(space, phi + root.x * psi, options.perron);
  LevelSetSolution solution{
      .alpha = alpha,
      .beta = root.x,
      .pressure_K_alpha = maximizer.pressure - root.x * alpha,
      .maximizer = std::move(maximizer),
      .warnings = {},
  };
  // Residual check on the Gibbs state itself, not the root-finder's copy.
  const double achieved = integrate(psi, solution.maximizer.measure);
  if (std::abs(achieved - alpha) > 10.0 * options.residual_tol)
    throw ConvergenceFailure("solve_beta: constraint residual drifted at the root");
  const double zero_tol = options.degenerate_tol * std::max(1.0, std::abs(range.upper));
  if (std::abs(range.lower) <= zero_tol || std::abs(range.upper) <= zero_tol)
    solution.warnings.emplace_back("0 lies on the boundary of the Birkhoff range of psi");
  return solution;
}

LevelSetSolution solve_beta(const ShiftSpace& space, const Potential& phi, const Potential& psi,
                            double alpha, const LevelSetOptions& options) {
  if (!phi.compatible_with(space) || !psi.compatible_with(space))
    throw InvalidInput("solve_beta: potentials do not match the shift");
  return solve_beta(space, phi.symbol_values(), psi.symbol_values(), alpha, options);
}

std::vector<SpectrumEntry> levelset_spectrum(const ShiftSpace& space, const Potential& phi,
                                             const Potential& psi, std::span<const double> grid,
                                             const LevelSetOptions& options, std::size_t threads) {
  std::vector<SpectrumEntry> entries(grid.size());
  detail::parallel_for(grid.size(), threads, [&](std::size_t i) {
    entries[i].alpha = grid[i];
    try {
      entries[i].solution = solve_beta(space, phi, psi, grid[i], options);
    } catch (const Error& e) {
      entries[i].error = e.what();
    }
  });
  return entries;
}

double concavity_defect(std::span<const SpectrumEntry> entries) {
  std::vector<std::pair<double, double>> points;
  for (const auto& e : entries)
    if (e.solution) points.emplace_back(e.alpha, e.solution->pressure_K_alpha);
  std::sort(points.begin(), points.end());
  double defect = 0.0;
  for (std::size_t i = 1; i + 1 < points.size(); ++i) {
    const auto [x0, y0] = points[i - 1];
    const auto [x1, y1] = points[i];
    const auto [x2, y2] = points[i + 1];
    const double chord = y0 + (y2 - y0) * (x1 - x0) / (x2 - x0);
    defect = std::max(defect, chord - y1);
  }
  return defect;
}

}  // namespace fulldim
