#include <doctest.h>

#include <cmath>
#include <vector>

#include "fulldim/level_set.hpp"
#include "fulldim/oracle.hpp"

using namespace fulldim;

namespace {

ShiftSpace golden() {
  Eigen::MatrixXi t(2, 2);
  t << 1, 1, 1, 0;
  return ShiftSpace(t);
}

double binary_entropy(double a) { return -a * std::log(a) - (1.0 - a) * std::log(1.0 - a); }

LevelSetRejection::Reason rejection_reason(const ShiftSpace& s, const Eigen::VectorXd& psi, double alpha) {
  try {
    solve_beta(s, Eigen::VectorXd::Zero(psi.size()), psi, alpha);
  } catch (const LevelSetRejection& e) {
    return e.reason();
  }
  FAIL("expected a rejection");
  return LevelSetRejection::Reason::outside_range;
}

}  // namespace

TEST_CASE("full 2-shift level sets have the binary-entropy closed form") {
  const ShiftSpace full = ShiftSpace::full(2);
  const Eigen::VectorXd phi = Eigen::Vector2d::Zero();
  const Eigen::VectorXd psi = Eigen::Vector2d(0.0, 1.0);
  for (int k = 1; k <= 9; ++k) {
    const double alpha = 0.1 * k;
    const LevelSetSolution s = solve_beta(full, phi, psi, alpha);
    CHECK(s.pressure_K_alpha == doctest::Approx(binary_entropy(alpha)).epsilon(1e-12));
    CHECK(s.beta == doctest::Approx(std::log(alpha / (1.0 - alpha))).epsilon(1e-10));
    CHECK(std::abs(integrate(psi, s.maximizer.measure) - alpha) <= 1e-10);
  }
}

TEST_CASE("Birkhoff range and rejection reasons") {
  const ShiftSpace g = golden();
  const Eigen::VectorXd psi = Eigen::Vector2d(0.0, 1.0);
  const BirkhoffRange r = birkhoff_range(g, psi);
  CHECK(r.lower == 0.0);
  CHECK(r.upper == 0.5);
  CHECK(r.lower_cycle == Word{0});
  CHECK(r.upper_cycle == Word{0, 1});
  CHECK_FALSE(r.degenerate());

  using Reason = LevelSetRejection::Reason;
  CHECK(rejection_reason(g, psi, 0.7) == Reason::outside_range);
  CHECK(rejection_reason(g, psi, -0.1) == Reason::outside_range);
  CHECK(rejection_reason(g, psi, 0.5) == Reason::on_boundary);
  CHECK(rejection_reason(g, psi, 0.0) == Reason::on_boundary);
  CHECK(rejection_reason(g, Eigen::Vector2d(1.0, 1.0), 1.0) == Reason::degenerate_range);
  CHECK(std::string(to_string(Reason::on_boundary)) == "on_boundary");

  try {
    solve_beta(g, Eigen::VectorXd(Eigen::Vector2d::Zero()), psi, 0.9);
  } catch (const LevelSetRejection& e) {
    CHECK(e.alpha() == 0.9);
    CHECK(e.range().upper_cycle == Word{0, 1});
  }
}

TEST_CASE("golden-mean level set agrees with the grid-search oracle") {
  const ShiftSpace g = golden();
  const Eigen::VectorXd phi = Eigen::Vector2d::Zero();
  const Eigen::VectorXd psi = Eigen::Vector2d(0.0, 1.0);
  const LevelSetSolution s = solve_beta(g, phi, psi, 0.25);
  const OracleResult grid = constrained_grid_search(g, phi, psi, 0.25, 200);
  CHECK(grid.value <= s.pressure_K_alpha + 1e-9);
  CHECK(s.pressure_K_alpha - grid.value < 5e-3);
  // Measures on the golden-mean shift with p(1) = 1/4 form a single point.
  CHECK(s.maximizer.measure.stochastic()(0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("level-set pressure is the Legendre transform of the pressure") {
  const ShiftSpace s = ShiftSpace::full(3);
  const Eigen::VectorXd phi = Eigen::Vector3d(0.2, -0.1, 0.4);
  const Eigen::VectorXd psi = Eigen::Vector3d(1.0, 2.0, 4.0);
  const double alpha = 2.1;
  const double h = 1e-5;
  const LevelSetSolution mid = solve_beta(s, phi, psi, alpha);
  const double left = solve_beta(s, phi, psi, alpha - h).pressure_K_alpha;
  const double right = solve_beta(s, phi, psi, alpha + h).pressure_K_alpha;
  CHECK((right - left) / (2.0 * h) == doctest::Approx(-mid.beta).epsilon(1e-6));
  CHECK(mid.maximizer.entropy + integrate(phi, mid.maximizer.measure) ==
        doctest::Approx(mid.pressure_K_alpha).epsilon(1e-10));
}

TEST_CASE("spectrum is concave and independent of the thread count") {
  const ShiftSpace g = golden();
  const Potential phi = Potential::constant(g, 0.0);
  const Potential psi = Potential::from_symbols(g, Eigen::Vector2d(0.0, 1.0));
  std::vector<double> grid;
  for (int k = 0; k <= 20; ++k) grid.push_back(0.025 * k);
  const auto one = levelset_spectrum(g, phi, psi, grid, {}, 1);
  const auto four = levelset_spectrum(g, phi, psi, grid, {}, 4);
  REQUIRE(one.size() == grid.size());
  CHECK_FALSE(one.front().solution.has_value());
  CHECK_FALSE(one.back().solution.has_value());
  CHECK_FALSE(one.front().error.empty());
  for (std::size_t k = 1; k + 1 < grid.size(); ++k) {
    REQUIRE(one[k].solution.has_value());
    CHECK(one[k].solution->beta == four[k].solution->beta);
    CHECK(one[k].solution->pressure_K_alpha == four[k].solution->pressure_K_alpha);
  }
  CHECK(concavity_defect(one) <= 1e-12);
}
