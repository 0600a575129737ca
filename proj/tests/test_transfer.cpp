#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "fulldim/errors.hpp"
#include "fulldim/transfer.hpp"

using namespace fulldim;

namespace {

const double kGolden = 0.5 * (1.0 + std::sqrt(5.0));

ShiftSpace golden() {
  Eigen::MatrixXi t(2, 2);
  t << 1, 1, 1, 0;
  return ShiftSpace(t);
}

double spectral_radius(const Eigen::MatrixXd& m) {
  return Eigen::EigenSolver<Eigen::MatrixXd>(m).eigenvalues().cwiseAbs().maxCoeff();
}

ShiftSpace random_mixing_space(std::mt19937_64& rng, std::size_t n) {
  std::bernoulli_distribution edge(0.5);
  while (true) {
    Eigen::MatrixXi t(n, n);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) t(a, b) = edge(rng) ? 1 : 0;
    try {
      ShiftSpace s(t);
      if (validate_mixing(s).mixing) return s;
    } catch (const std::exception&) {
    }
  }
}

}  // namespace

TEST_CASE("pressure of constant potentials") {
  CHECK(pressure(ShiftSpace::full(2), Eigen::Vector2d::Zero()) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(pressure(golden(), Eigen::Vector2d::Zero()) == doctest::Approx(std::log(kGolden)).epsilon(1e-13));
  CHECK(pressure(ShiftSpace::full(3), Potential::constant(ShiftSpace::full(3), 2.5)) ==
        doctest::Approx(std::log(3.0) + 2.5).epsilon(1e-14));
  // Large potentials are rescaled internally.
  CHECK(pressure(ShiftSpace::full(2), Eigen::Vector2d(800.0, 800.0)) ==
        doctest::Approx(800.0 + std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("pressure matches a dense eigen-solver") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 5);
    const ShiftSpace s = random_mixing_space(rng, n);
    Eigen::VectorXd phi(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < phi.size(); ++i) phi(i) = u(rng);
    Eigen::MatrixXd b = s.transitions().cast<double>();
    for (Eigen::Index a = 0; a < b.rows(); ++a) b.row(a) *= std::exp(phi(a));
    CHECK(pressure(s, phi) == doctest::Approx(std::log(spectral_radius(b))).epsilon(1e-11));
  }
}

TEST_CASE("depth-2 potentials match the edge-weighted matrix") {
  const ShiftSpace g = golden();
  const Potential p(g, 2, {{{0, 0}, 0.3}, {{0, 1}, -1.1}, {{1, 0}, 0.7}});
  Eigen::Matrix2d m;
  m << std::exp(0.3), std::exp(-1.1), std::exp(0.7), 0.0;
  CHECK(pressure(g, p) == doctest::Approx(std::log(spectral_radius(m))).epsilon(1e-12));
}

TEST_CASE("non-mixing shifts are rejected") {
  Eigen::MatrixXi swap(2, 2);
  swap << 0, 1, 1, 0;
  CHECK_THROWS_AS(pressure(ShiftSpace(swap), Eigen::Vector2d::Zero()), DomainRejection);
  CHECK_THROWS_AS(equilibrium(ShiftSpace(swap), Eigen::Vector2d::Zero()), DomainRejection);
}

TEST_CASE("equilibrium state of the golden-mean shift is the Parry measure") {
  const EquilibriumReport r = equilibrium(golden(), Eigen::Vector2d::Zero());
  CHECK(r.pressure == doctest::Approx(std::log(kGolden)).epsilon(1e-13));
  CHECK(r.measure.stochastic()(0, 0) == doctest::Approx(1.0 / kGolden).epsilon(1e-12));
  CHECK(r.measure.stationary()(0) == doctest::Approx(kGolden * kGolden / (1.0 + kGolden * kGolden)).epsilon(1e-12));
  CHECK(r.entropy == doctest::Approx(r.pressure).epsilon(1e-12));
  CHECK(r.right_eigvec.sum() == doctest::Approx(1.0));
  CHECK(r.left_eigvec.dot(r.right_eigvec) == doctest::Approx(1.0));
}

TEST_CASE("Gibbs constants for the golden-mean Parry measure") {
  const ShiftSpace g = golden();
  const Potential zero = Potential::constant(g, 0.0);
  const EquilibriumReport r = equilibrium(g, zero);
  CHECK(r.gibbs_lower == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-12));
  CHECK(r.gibbs_upper == doctest::Approx(std::pow(kGolden, 3) / (kGolden * kGolden + 1.0)).epsilon(1e-12));
  const GibbsRatioResult check = gibbs_ratio_check(r, g, zero, 12);
  CHECK(check.min_ratio >= r.gibbs_lower - 1e-12);
  CHECK(check.max_ratio <= r.gibbs_upper + 1e-12);
  // Both bounds are attained once every first/last pair occurs.
  CHECK(check.min_ratio == doctest::Approx(r.gibbs_lower).epsilon(1e-10));
  CHECK(check.max_ratio == doctest::Approx(r.gibbs_upper).epsilon(1e-10));
  CHECK(check.cylinders == 984);
  CHECK_THROWS_AS(gibbs_ratio_check(r, g, zero, 40, 1000), DomainRejection);
}

TEST_CASE("second eigenvalue of the Parry chain") {
  const EquilibriumReport r = equilibrium(golden(), Eigen::Vector2d::Zero());
  CHECK(second_eigenvalue_modulus(r.measure) == doctest::Approx(1.0 / (kGolden * kGolden)).epsilon(1e-9));
  const MarkovMeasure iid = MarkovMeasure::bernoulli(Eigen::Vector3d(0.2, 0.3, 0.5));
  CHECK(second_eigenvalue_modulus(iid) < 1e-12);
}

TEST_CASE("q_form against the fundamental matrix") {
  const ShiftSpace g = golden();
  const Potential zero = Potential::constant(g, 0.0);
  const Potential h = Potential::from_symbols(g, Eigen::Vector2d(0.0, 1.0));
  const EquilibriumReport r = equilibrium(g, zero);
  const Eigen::MatrixXd& q = r.measure.stochastic();
  const Eigen::VectorXd& p = r.measure.stationary();
  const Eigen::MatrixXd pi = Eigen::VectorXd::Ones(2) * p.transpose();
  const Eigen::MatrixXd z = (Eigen::MatrixXd::Identity(2, 2) - q + pi).inverse() - pi;
  const Eigen::Vector2d hv(0.0, 1.0);
  const double exact = p.cwiseProduct(hv).dot(z * hv);
  CHECK(exact > 0.0);

  double previous_error = 1.0;
  for (std::size_t n = 2; n <= 40; n += 2) {
    const QFormEstimate e = q_form(g, zero, h, h, n);
    const double error = std::abs(e.value - exact);
    CHECK(e.truncation_n == n);
    // 1e-14 allows for rounding once the tail is negligible.
    CHECK(error <= e.tail_bound + 1e-14);
    CHECK(error <= previous_error + 1e-14);
    previous_error = error;
  }
  CHECK(q_form(g, zero, h, h, 80).value == doctest::Approx(exact).epsilon(1e-13));
  CHECK_THROWS_AS(q_form(g, zero, h, h, 0), InvalidInput);
}
