#include <doctest.h>

#include <cmath>
#include <random>

#include "fulldim/carpet.hpp"
#include "fulldim/errors.hpp"

using namespace fulldim;

namespace {

const double kLog2 = std::log(2.0);
const double kLog3 = std::log(3.0);
const double kA = kLog2 / kLog3;

CarpetSystem mcmullen_21() {
  const int rows[] = {2, 1};
  return mcmullen_carpet(3, 2, rows);
}

ShiftSpace golden() {
  Eigen::MatrixXi t(2, 2);
  t << 1, 1, 1, 0;
  return ShiftSpace(t);
}

CarpetSystem golden_base_carpet() {
  return CarpetSystem(golden(), {{{0, 1}, {1.5, 2.5}}, {{0, 2, 3}, {1.2, 1.3, 1.9}}},
                      Eigen::Vector2d(0.7, 1.1));
}

double binary_entropy(double p) { return -p * std::log(p) - (1.0 - p) * std::log(1.0 - p); }

MarkovMeasure random_markov(std::mt19937_64& rng, const ShiftSpace& s) {
  std::exponential_distribution<double> e(1.0);
  Eigen::MatrixXd q = s.transitions().cast<double>();
  for (Eigen::Index a = 0; a < q.rows(); ++a) {
    for (Eigen::Index b = 0; b < q.cols(); ++b) q(a, b) *= e(rng) + 1e-3;
    q.row(a) /= q.row(a).sum();
  }
  return MarkovMeasure::from_stochastic(q);
}

}  // namespace

TEST_CASE("carpet validation") {
  const ShiftSpace full = ShiftSpace::full(2);
  const Eigen::Vector2d psi(0.5, 0.5);
  CHECK_THROWS_AS(CarpetSystem(full, {{{0}, {1.0}}}, psi), InvalidInput);
  CHECK_THROWS_AS(CarpetSystem(full, {{{0}, {1.0}}, {{}, {}}}, psi), InvalidInput);
  CHECK_THROWS_AS(CarpetSystem(full, {{{0, 0}, {1.0, 1.0}}, {{0}, {1.0}}}, psi), InvalidInput);
  CHECK_THROWS_AS(CarpetSystem(full, {{{0}, {-1.0}}, {{0}, {1.0}}}, psi), InvalidInput);
  CHECK_THROWS_AS(CarpetSystem(full, {{{0}, {1.0}}, {{0}, {1.0}}}, Eigen::Vector2d(0.5, 0.0)), InvalidInput);
  // Domination: every phi must be at least every psi.
  CHECK_THROWS_AS(CarpetSystem(full, {{{0}, {0.4}}, {{0}, {1.0}}}, psi), InvalidInput);
  const CarpetSystem equal(full, {{{0}, {0.5}}, {{0}, {1.0}}}, psi);
  CHECK(equal.warnings().size() == 1);
  // A single rectangle is a point, which is allowed.
  CHECK_NOTHROW(CarpetSystem(ShiftSpace::full(1), {{{0}, {1.0}}}, Eigen::VectorXd::Constant(1, 0.5)));

  const int bad[] = {1, 1, 1};
  CHECK_THROWS_AS(mcmullen_carpet(3, 3, bad), InvalidInput);
  const CarpetSystem mc = mcmullen_21();
  CHECK(mc.row_count() == 2);
  CHECK(mc.rectangle_count() == 3);
}

TEST_CASE("fiber pressure") {
  const CarpetSystem mc = mcmullen_21();
  const FiberPressure f0 = fiber_pressure(mc, 0.0);
  CHECK(f0.log_A(0) == doctest::Approx(kLog2).epsilon(1e-15));
  CHECK(f0.log_A(1) == 0.0);
  const FiberPressure f1 = fiber_pressure(mc, 1.0);
  CHECK(f1.log_A(0) == doctest::Approx(std::log(2.0 / 3.0)).epsilon(1e-15));
  CHECK(f1.log_A(1) == doctest::Approx(-kLog3).epsilon(1e-15));
  CHECK((fiber_pressure(mc, 0.3).log_A.array() > fiber_pressure(mc, 0.31).log_A.array()).all());
  CHECK_THROWS_AS(fiber_pressure(mc, -1.0), InvalidInput);

  const auto w = canonical_fiber_weights(golden_base_carpet(), 0.7);
  CHECK(w[0].sum() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(w[0](0) / w[0](1) == doctest::Approx(std::exp(0.7 * 1.0)).epsilon(1e-14));
}

TEST_CASE("t of nu") {
  const CarpetSystem mc = mcmullen_21();
  const ShiftSpace& base = mc.base();
  CHECK(t_of_nu(mc, MarkovMeasure::periodic_orbit(base, Word{1})) == 0.0);
  CHECK(t_of_nu(mc, MarkovMeasure::periodic_orbit(base, Word{0})) == doctest::Approx(kA).epsilon(1e-11));
  CHECK(t_of_nu(mc, MarkovMeasure::bernoulli(Eigen::Vector2d(0.5, 0.5))) ==
        doctest::Approx(0.5 * kA).epsilon(1e-11));
}

TEST_CASE("extremes of t") {
  const TRange mc = t_extremes(mcmullen_21());
  CHECK(mc.lower == 0.0);
  CHECK(mc.upper == doctest::Approx(kA).epsilon(1e-13));
  CHECK(mc.upper_cycle == Word{0});
  CHECK(mc.lower_cycle == Word{1});

  const CarpetSystem g(golden(), {{{0, 1}, {kLog3, kLog3}}, {{0}, {kLog3}}}, Eigen::Vector2d(kLog2, kLog2));
  const TRange gr = t_extremes(g);
  CHECK(gr.upper == doctest::Approx(kA).epsilon(1e-13));
  CHECK(gr.lower == doctest::Approx(0.5 * kA).epsilon(1e-13));
  CHECK(gr.lower_cycle == Word{0, 1});

  const double L = 1.7;
  const CarpetSystem same(ShiftSpace::full(3), {{{0, 1, 2}, {L, L, L}}, {{0, 1, 2}, {L, L, L}}, {{3, 4, 5}, {L, L, L}}},
                          Eigen::Vector3d(1.0, 1.2, 1.5));
  const TRange sr = t_extremes(same);
  CHECK(sr.lower == doctest::Approx(kLog3 / L).epsilon(1e-13));
  CHECK(sr.upper == doctest::Approx(kLog3 / L).epsilon(1e-13));
}

TEST_CASE("Bowen root") {
  CHECK(bowen_root(ShiftSpace::full(2), Eigen::Vector2d(kLog2, kLog2)) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(bowen_root(ShiftSpace::full(3), Eigen::Vector3d(kLog2, kLog2, kLog2)) ==
        doctest::Approx(kLog3 / kLog2).epsilon(1e-13));
  // Moran equation sum_i exp(-s psi_i) = 1.
  const double s = bowen_root(ShiftSpace::full(2), Eigen::Vector2d(1.0, 2.0));
  CHECK(std::exp(-s) + std::exp(-2.0 * s) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("measure dimension and the Ledrappier-Young value") {
  const CarpetSystem mc = mcmullen_21();
  const double p0 = 2.0 * std::pow(2.0, kA - 1.0) / (std::pow(2.0, kA) + 1.0);
  const MarkovMeasure opt = MarkovMeasure::bernoulli(Eigen::Vector2d(p0, 1.0 - p0));
  const double d_closed = std::log2(std::pow(2.0, kA) + 1.0);
  CHECK(d_closed == doctest::Approx(1.3496838201955774).epsilon(1e-15));
  CHECK(p0 == doctest::Approx(0.6076219672418293).epsilon(1e-15));
  CHECK(measure_dimension(mc, opt) == doctest::Approx(d_closed).epsilon(1e-11));
  CHECK(measure_dimension(mc, MarkovMeasure::periodic_orbit(mc.base(), Word{0})) ==
        doctest::Approx(kA).epsilon(1e-11));
  CHECK(measure_dimension(mc, MarkovMeasure::bernoulli(Eigen::Vector2d(0.5, 0.5))) ==
        doctest::Approx(1.0 + 0.5 * kA).epsilon(1e-11));

  const std::vector<Eigen::VectorXd> uniform{Eigen::Vector2d(0.5, 0.5), Eigen::VectorXd::Ones(1)};
  const MarkovMeasure rows = MarkovMeasure::bernoulli(Eigen::Vector2d(2.0 / 3.0, 1.0 / 3.0));
  const double h_nu = binary_entropy(2.0 / 3.0);
  CHECK(ly_dimension(mc, rows, uniform) ==
        doctest::Approx(h_nu / kLog2 + (kLog3 - h_nu) / kLog3).epsilon(1e-13));
  CHECK(ly_dimension(mc, rows, uniform) == doctest::Approx(1.338916).epsilon(1e-6));
  CHECK(ly_dimension(mc, opt, uniform) == doctest::Approx(d_closed).epsilon(1e-11));

  const std::vector<Eigen::VectorXd> point{Eigen::Vector2d(1.0, 0.0), Eigen::VectorXd::Ones(1)};
  CHECK(ly_dimension(mc, MarkovMeasure::periodic_orbit(mc.base(), Word{0}), point) == 0.0);
  CHECK_THROWS_AS(ly_dimension(mc, rows, {Eigen::Vector2d(0.5, 0.6), Eigen::VectorXd::Ones(1)}), InvalidInput);
}

TEST_CASE("restraint inequality with equality at canonical weights") {
  const CarpetSystem sys = golden_base_carpet();
  std::mt19937_64 rng(5);
  std::exponential_distribution<double> e(1.0);
  for (int k = 0; k < 50; ++k) {
    const MarkovMeasure nu = random_markov(rng, sys.base());
    std::vector<Eigen::VectorXd> w;
    for (const auto& row : sys.rows()) {
      Eigen::VectorXd x(static_cast<Eigen::Index>(row.phi.size()));
      for (Eigen::Index j = 0; j < x.size(); ++j) x(j) = e(rng);
      w.push_back(x / x.sum());
    }
    CHECK(ly_dimension(sys, nu, w) <= measure_dimension(sys, nu) + 1e-12);
    const double t = t_of_nu(sys, nu);
    CHECK(ly_dimension(sys, nu, canonical_fiber_weights(sys, t)) ==
          doctest::Approx(measure_dimension(sys, nu)).epsilon(1e-10));
  }
}

TEST_CASE("total space and lifted product measures") {
  const CarpetSystem sys = golden_base_carpet();
  const ShiftSpace total = total_space(sys);
  REQUIRE(total.symbol_count() == 5);
  CHECK(total.allowed(0, 4));
  CHECK_FALSE(total.allowed(2, 3));
  CHECK(total.allowed(4, 1));

  std::mt19937_64 rng(9);
  const MarkovMeasure nu = random_markov(rng, sys.base());
  const auto w = canonical_fiber_weights(sys, 0.4);
  const MarkovMeasure mu = lift_product_measure(sys, nu, w);
  CHECK(mu.compatible_with(total));
  double fiber = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    double h = 0.0;
    for (Eigen::Index j = 0; j < w[i].size(); ++j) h -= w[i](j) * std::log(w[i](j));
    fiber += nu.stationary()(static_cast<Eigen::Index>(i)) * h;
  }
  CHECK(measure_entropy(total, mu) == doctest::Approx(measure_entropy(nu) + fiber).epsilon(1e-12));
}

TEST_CASE("full dimension of the McMullen carpet") {
  const FullDimensionReport r = solve_full_dimension(mcmullen_21());
  const double p0 = 0.6076219672418293;
  CHECK(r.D == doctest::Approx(1.3496838201955774).epsilon(1e-10));
  CHECK(r.endpoint_case == EndpointCase::interior);
  CHECK(r.t_lower == 0.0);
  CHECK(r.t_upper == doctest::Approx(kA).epsilon(1e-13));
  CHECK(r.t_star == doctest::Approx(p0 * kA).epsilon(1e-7));
  CHECK(r.beta_star == doctest::Approx(kA).epsilon(1e-6));
  CHECK(r.nu_star.stationary()(0) == doctest::Approx(p0).epsilon(1e-7));
  CHECK(r.fiber_weights[0].sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(r.diagnostics.constraint_residual) < 1e-9);
  CHECK(std::abs(r.diagnostics.pressure_residual) < 1e-9);
  CHECK(std::abs(r.diagnostics.variational_residual) < 1e-9);
  CHECK(r.diagnostics.dimension_of_nu_star == doctest::Approx(r.D).epsilon(1e-12));
  CHECK(r.trace.size() == 64);
  CHECK_FALSE(r.degenerate_t_range);
}

TEST_CASE("full dimension of trivial carpets") {
  SUBCASE("vertical segment") {
    const CarpetSystem line(ShiftSpace::full(2), {{{0}, {kLog3}}, {{0}, {kLog3}}}, Eigen::Vector2d(kLog2, kLog2));
    const FullDimensionReport r = solve_full_dimension(line);
    CHECK(r.D == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.t_star == 0.0);
    CHECK(r.degenerate_t_range);
  }
  SUBCASE("whole square") {
    const CarpetSystem sq(ShiftSpace::full(2), {{{0, 1}, {kLog2, kLog2}}, {{0, 1}, {kLog2, kLog2}}},
                          Eigen::Vector2d(kLog2, kLog2));
    const FullDimensionReport r = solve_full_dimension(sq);
    CHECK(r.D == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(r.endpoint_case == EndpointCase::lower_endpoint);
    CHECK(r.beta_finite);
  }
  SUBCASE("single rectangle") {
    const int rows[] = {1, 0};
    const FullDimensionReport r = solve_full_dimension(mcmullen_carpet(3, 2, rows));
    CHECK(r.D == 0.0);
    CHECK(r.degenerate_t_range);
  }
}

TEST_CASE("golden-mean base carpet against a one-parameter search") {
  // Markov measures on the golden-mean shift are parametrised by q = Q(0, 1),
  // and the optimum is a one-step Markov measure.
  const CarpetSystem sys = golden_base_carpet();
  auto value = [&](double q) {
    Eigen::Matrix2d m;
    m << 1.0 - q, q, 1.0, 0.0;
    return measure_dimension(sys, MarkovMeasure::from_stochastic(m));
  };
  double lo = 1e-6, hi = 1.0 - 1e-6;
  double best_q = lo, best = value(lo);
  for (int k = 1; k <= 2000; ++k) {
    const double q = lo + (hi - lo) * k / 2000.0;
    if (const double v = value(q); v > best) best = v, best_q = q;
  }
  double a = best_q - 1e-3, b = best_q + 1e-3;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  while (b - a > 1e-12) {
    const double x1 = b - g * (b - a), x2 = a + g * (b - a);
    if (value(x1) >= value(x2)) b = x2; else a = x1;
  }
  const double oracle = value(0.5 * (a + b));
  const FullDimensionReport r = solve_full_dimension(sys);
  CHECK(r.D == doctest::Approx(oracle).epsilon(1e-10));
  CHECK(r.D >= oracle - 1e-12);
  CHECK(r.endpoint_case == EndpointCase::interior);
  CHECK(r.nu_star.stochastic()(0, 1) == doctest::Approx(0.5 * (a + b)).epsilon(1e-5));
  CHECK(r.t_lower <= r.t_star);
  CHECK(r.t_star <= r.t_upper);
}

TEST_CASE("joint scaling of phi and psi divides D") {
  const CarpetSystem sys = golden_base_carpet();
  const double c = 2.5;
  std::vector<CarpetRow> rows = sys.rows();
  for (auto& r : rows)
    for (auto& v : r.phi) v *= c;
  const CarpetSystem scaled(sys.base(), rows, c * sys.psi());
  const FullDimensionReport a = solve_full_dimension(sys);
  const FullDimensionReport b = solve_full_dimension(scaled);
  CHECK(b.D == doctest::Approx(a.D / c).epsilon(1e-9));
  CHECK(b.t_star == doctest::Approx(a.t_star / c).epsilon(1e-7));

  // Scaling phi alone divides t(nu) by c.
  const CarpetSystem fiber_only(sys.base(), rows, sys.psi());
  const MarkovMeasure nu = MarkovMeasure::periodic_orbit(sys.base(), Word{0, 1});
  CHECK(t_of_nu(fiber_only, nu) == doctest::Approx(t_of_nu(sys, nu) / c).epsilon(1e-10));
}

TEST_CASE("degenerate t range collapses to the Bowen value") {
  auto make = [](double eps) {
    std::vector<CarpetRow> rows;
    for (int i = 0; i < 3; ++i) rows.push_back({{0, 1}, {1.3 + (i == 2 ? eps : 0.0), 1.7}});
    Eigen::MatrixXi t(3, 3);
    t << 1, 1, 0, 1, 0, 1, 1, 1, 1;
    return CarpetSystem(ShiftSpace(t), rows, Eigen::Vector3d(0.5, 0.8, 1.1));
  };
  const FullDimensionReport r0 = solve_full_dimension(make(0.0));
  CHECK(r0.degenerate_t_range);
  CHECK(r0.D == doctest::Approx(r0.diagnostics.bowen_root + r0.t_upper).epsilon(1e-12));
  for (double eps : {1e-3, -1e-3, 1e-4}) {
    const FullDimensionReport r = solve_full_dimension(make(eps));
    CHECK_FALSE(r.degenerate_t_range);
    CHECK(r.endpoint_case == EndpointCase::interior);
    CHECK(std::abs(r.D - r0.D) < 4.0 * std::abs(eps));
  }
}

TEST_CASE("the solution is the supremum over random Markov measures") {
  const CarpetSystem sys(ShiftSpace::full(3),
                         {{{0, 1}, {1.4, 2.0}}, {{0, 1, 2}, {1.3, 1.5, 2.2}}, {{5}, {1.6}}},
                         Eigen::Vector3d(0.6, 0.9, 1.2));
  const FullDimensionReport r = solve_full_dimension(sys);
  std::mt19937_64 rng(21);
  for (int k = 0; k < 200; ++k) CHECK(measure_dimension(sys, random_markov(rng, sys.base())) <= r.D + 1e-8);
  CHECK(measure_dimension(sys, r.nu_star) == doctest::Approx(r.D).epsilon(1e-10));
}

TEST_CASE("thread count does not change the report") {
  CarpetOptions one, four;
  four.threads = 4;
  const FullDimensionReport a = solve_full_dimension(golden_base_carpet(), one);
  const FullDimensionReport b = solve_full_dimension(golden_base_carpet(), four);
  CHECK(a.D == b.D);
  CHECK(a.t_star == b.t_star);
  CHECK(a.beta_star == b.beta_star);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t k = 0; k < a.trace.size(); ++k) CHECK(a.trace[k].h == b.trace[k].h);
}
