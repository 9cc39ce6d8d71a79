#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <memory>

#include "kinex/collision.hpp"
#include "kinex/errors.hpp"
#include "kinex/expm_tridiag.hpp"
#include "kinex/moments.hpp"

using namespace kinex;

namespace {

Profile bimodal(const VelocityGrid& vg) {
  const auto a = maxwellian(MomentVector::from_primitive(0.6, -1.0, 0.5), vg);
  const auto b = maxwellian(MomentVector::from_primitive(0.4, 1.5, 0.8), vg);
  Profile g(a.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = a[i] + b[i];
  return g;
}

double max_abs_diff(const Profile& a, const Profile& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Classical RK4 on dg/dt = rate(g), used as a fine-step oracle.
Profile rk4(const HomogeneousSolver& solver, Profile g, double s, int steps) {
  const double h = s / steps;
  const std::size_t n = g.size();
  Profile k1(n), k2(n), k3(n), k4(n), y(n);
  for (int k = 0; k < steps; ++k) {
    solver.rate(g, k1);
    for (std::size_t i = 0; i < n; ++i) y[i] = g[i] + 0.5 * h * k1[i];
    solver.rate(y, k2);
    for (std::size_t i = 0; i < n; ++i) y[i] = g[i] + 0.5 * h * k2[i];
    solver.rate(y, k3);
    for (std::size_t i = 0; i < n; ++i) y[i] = g[i] + h * k3[i];
    solver.rate(y, k4);
    for (std::size_t i = 0; i < n; ++i)
      g[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return g;
}

}  // namespace

TEST_CASE("model names round-trip") {
  for (auto m : {CollisionModel::bgk, CollisionModel::esbgk, CollisionModel::fp,
                 CollisionModel::boltz_mock})
    CHECK(parse_collision_model(to_string(m)) == m);
  CHECK_THROWS_AS(parse_collision_model("lbgk"), ConfigError);
}

TEST_CASE("exact BGK relaxation") {
  const auto vg = build_velocity_grid(15.0, 150);
  const auto g = bimodal(vg);
  const auto m = maxwellian(compute_moments(g, vg), vg);

  CHECK(max_abs_diff(bgk_exp(g, 0.0, 1.0, vg), g) == 0.0);
  const auto half = bgk_exp(g, std::log(2.0), 1.0, vg);
  for (std::size_t i = 0; i < g.size(); ++i)
    CHECK(half[i] == doctest::Approx(0.5 * g[i] + 0.5 * m[i]).epsilon(1e-14));
  // The Maxwellian is a fixed point up to the quadrature moments.
  CHECK(max_abs_diff(bgk_exp(m, 3.7, 1.0, vg), m) < 1e-15);

  const auto out = bgk_exp(g, 0.8, 2.0, vg);
  const auto drift = moment_drift(g, out, vg);
  for (double d : drift) CHECK(d <= 1e-12);
  CHECK(*std::min_element(out.begin(), out.end()) >= 0.0);
  CHECK_THROWS_AS(bgk_exp(g, -1.0, 1.0, vg), DomainError);
}

TEST_CASE("BGK implicit resolve solves (I - cQ) f = rhs") {
  const auto vg = build_velocity_grid(15.0, 150);
  const BgkSolver solver(vg, 1.5);
  const auto g = bimodal(vg);
  Profile f(g.size()), q(g.size());
  solver.resolve(g, 0.3, f);
  solver.rate(f, q);
  for (std::size_t i = 0; i < g.size(); ++i)
    CHECK(f[i] - 0.3 * q[i] == doctest::Approx(g[i]).epsilon(1e-12));
}

TEST_CASE("Lobatto weights") {
  const auto one = lobatto_weights(1.0);
  CHECK(one.wg == doctest::Approx(0.367879).epsilon(1e-6));
  CHECK(one.w1 == doctest::Approx(0.264241).epsilon(1e-6));
  CHECK(one.w2 == doctest::Approx(0.367879).epsilon(1e-6));
  CHECK(one.wg + one.w1 + one.w2 == doctest::Approx(1.0).epsilon(1e-15));

  const auto tiny = lobatto_weights(1e-12);
  CHECK(tiny.wg == doctest::Approx(1.0));
  CHECK(tiny.w1 == doctest::Approx(5e-13).epsilon(1e-9));
  CHECK(tiny.w2 == doctest::Approx(5e-13).epsilon(1e-9));

  const auto huge = lobatto_weights(1e6);
  CHECK(huge.wg == 0.0);
  CHECK(huge.w1 == doctest::Approx(1e-6).epsilon(1e-9));
  CHECK(huge.w2 == doctest::Approx(1.0).epsilon(1e-6));

  // Series and closed form agree on both sides of the switch.
  const double l = kLobattoSeriesThreshold;
  const auto below = lobatto_weights(l * (1.0 - 1e-9));
  const auto above = lobatto_weights(l * (1.0 + 1e-9));
  CHECK(below.w1 == doctest::Approx(above.w1).epsilon(1e-7));
  CHECK(below.w2 == doctest::Approx(above.w2).epsilon(1e-7));
  CHECK_THROWS_AS(lobatto_weights(-1.0), DomainError);
}

TEST_CASE("ES-BGK covariance relaxation") {
  MomentVector mv = MomentVector::from_primitive(2, 1.0, Eigen::Vector3d::Zero(), 1.0);
  mv.theta(0, 0) = 1.4;
  mv.theta(1, 1) = 0.6;
  const auto t0 = esbgk_tbar_at(0.0, 1.0, -0.5, mv);
  const auto expected = blended_temperature(mv, -0.5);
  CHECK((t0 - expected).norm() < 1e-15);
  const auto tinf = esbgk_tbar_at(1e3, 1.0, -0.5, mv);
  CHECK(tinf(0, 0) == doctest::Approx(1.0));
  CHECK(tinf(1, 1) == doctest::Approx(1.0));
  const auto t_nu0 = esbgk_tbar_at(0.3, 1.0, 0.0, mv);
  CHECK(t_nu0(0, 0) == doctest::Approx(1.0));
  CHECK(t_nu0(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("ES-BGK step") {
  const auto vg = build_velocity_grid(12.0, 60, 2);
  Profile g(vg.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double vx = vg.velocity(k, 0), vy = vg.velocity(k, 1);
    g[k] = 0.6 * std::exp(-((vx + 1.0) * (vx + 1.0) / 0.5 + vy * vy) / 2.0) +
           0.4 * std::exp(-((vx - 1.5) * (vx - 1.5) + vy * vy / 0.8) / 2.0);
  }
  SUBCASE("nu = 0 reduces to BGK") {
    const auto a = esbgk_exp(g, 0.7, 1.0, 0.0, vg);
    const auto b = bgk_exp(g, 0.7, 1.0, vg);
    CHECK(max_abs_diff(a, b) < 1e-14);
  }
  SUBCASE("conservation and positivity") {
    const auto out = esbgk_exp(g, 0.4, 1.0, -0.5, vg);
    for (double d : moment_drift(g, out, vg)) CHECK(d <= 1e-12);
    CHECK(*std::min_element(out.begin(), out.end()) >= 0.0);
  }
  SUBCASE("long times reach the Maxwellian") {
    // The weight on the initial Gaussian decays like 1/s.
    const auto m = maxwellian(compute_moments(g, vg), vg);
    const double d1 = max_abs_diff(esbgk_exp(g, 1e3, 1.0, -0.5, vg), m);
    const double d2 = max_abs_diff(esbgk_exp(g, 1e9, 1.0, -0.5, vg), m);
    CHECK(d1 == doctest::Approx(1e6 * d2).epsilon(1e-3));
    CHECK(d2 < 1e-10);
  }
}

TEST_CASE("Boltzmann midpoint with BGK-shaped gain is exact") {
  const auto vg = build_velocity_grid(15.0, 150);
  const auto g = bimodal(vg);
  for (double mu : {0.5, 1.0, 3.0}) {
    const BgkShapedGain gain(mu);
    for (double s : {1e-3, 0.1, 1.0, 10.0}) {
      const auto a = boltzmann_expmidpoint(g, s, gain, vg);
      const auto b = bgk_exp(g, s, mu, vg);
      CHECK(max_abs_diff(a, b) <= 1e-13);
    }
  }
  const auto m = maxwellian(compute_moments(g, vg), vg);
  CHECK(max_abs_diff(boltzmann_expmidpoint(m, 2.0, BgkShapedGain(1.0), vg), m) < 1e-15);
}

TEST_CASE("Boltzmann midpoint rejects negative gain") {
  struct NegativeGain final : GainEvaluator {
    double mu() const override { return 1.0; }
    void gain(std::span<const double>, const VelocityGrid&, std::span<double> out) const override {
      std::fill(out.begin(), out.end(), -1.0);
    }
  };
  const auto vg = build_velocity_grid(5.0, 20);
  const auto g = maxwellian(MomentVector::from_primitive(1.0, 0.0, 1.0), vg);
  CHECK_THROWS_AS(boltzmann_expmidpoint(g, 0.5, NegativeGain{}, vg), ContractViolation);
}

TEST_CASE("Boltzmann midpoint local error is third order") {
  const auto vg = build_velocity_grid(15.0, 150);
  const auto g = bimodal(vg);
  const BoltzmannMidpointSolver solver(vg, std::make_shared<EsbgkShapedGain>(2.0, 1.0, -0.5));
  double prev = 0.0;
  for (double s : {0.2, 0.1, 0.05}) {
    const double err = max_abs_diff(solver.apply(g, s), rk4(solver, g, s, 400));
    if (prev > 0.0) CHECK(std::log2(prev / err) >= 2.7);
    prev = err;
  }
}

TEST_CASE("Fokker-Planck step") {
  const auto vg = build_velocity_grid(15.0, 150);
  const auto g = bimodal(vg);
  const auto m = maxwellian(compute_moments(g, vg), vg);

  CHECK(max_abs_diff(fp_exp(g, 0.0, vg), g) == 0.0);
  for (auto method : {FpMethod::rational_flux, FpMethod::eigen_symmetric}) {
    const FpOptions opts{method, false};
    const auto eq = fp_exp(m, 0.5, vg, opts);
    CHECK(max_abs_diff(eq, m) < 1e-12);
    const auto out = fp_exp(g, 0.3, vg, opts);
    const auto drift = moment_drift(g, out, vg);
    CHECK(drift[0] <= 1e-12);
    CHECK(*std::min_element(out.begin(), out.end()) >= 0.0);
    const auto late = fp_exp(g, 50.0, vg, opts);
    CHECK(max_abs_diff(late, m) < 1e-6);
  }
  const auto a = fp_exp(g, 0.7, vg, {FpMethod::rational_flux, false});
  const auto b = fp_exp(g, 0.7, vg, {FpMethod::eigen_symmetric, false});
  CHECK(max_abs_diff(a, b) < 1e-12);
}

TEST_CASE("Fokker-Planck step matches an RK4 oracle") {
  const auto vg = build_velocity_grid(15.0, 150);
  const auto g = bimodal(vg);
  const FokkerPlanckSolver solver(vg);
  const double s = 0.05;
  // The step freezes the operator at the moments of its input.
  const auto mv = compute_moments(g, vg);
  const auto q = fp_flux_operator(mv.u[0], mv.T, vg);
  const int steps = 4000;
  const double h = s / steps;
  const std::size_t n = g.size();
  Profile y = g, k1(n), k2(n), k3(n), k4(n), t(n);
  for (int k = 0; k < steps; ++k) {
    q.apply(y, k1);
    for (std::size_t i = 0; i < n; ++i) t[i] = y[i] + 0.5 * h * k1[i];
    q.apply(t, k2);
    for (std::size_t i = 0; i < n; ++i) t[i] = y[i] + 0.5 * h * k2[i];
    q.apply(t, k3);
    for (std::size_t i = 0; i < n; ++i) t[i] = y[i] + h * k3[i];
    q.apply(t, k4);
    for (std::size_t i = 0; i < n; ++i)
      y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  CHECK(max_abs_diff(solver.apply(g, s), y) < 1e-10);
}

TEST_CASE("Fokker-Planck resolve keeps nonnegative data nonnegative") {
  const auto vg = build_velocity_grid(15.0, 150);
  const FokkerPlanckSolver solver(vg);
  auto g = bimodal(vg);
  g[10] = 0.0;
  Profile f(g.size()), q(g.size());
  solver.resolve(g, 1e6, f);
  CHECK(*std::min_element(f.begin(), f.end()) >= 0.0);
  solver.resolve(g, 0.2, f);
  // Q is frozen at the moments of rhs; the residual uses that operator.
  const auto mv = compute_moments(g, vg);
  fp_flux_operator(mv.u[0], mv.T, vg).apply(f, q);
  const double gmax = *std::max_element(g.begin(), g.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    worst = std::max(worst, std::abs(f[i] - 0.2 * q[i] - g[i]));
  CHECK(worst <= 1e-13 * gmax);
}

TEST_CASE("solver factory") {
  const auto vg = build_velocity_grid(10.0, 60);
  for (auto m : {CollisionModel::bgk, CollisionModel::esbgk, CollisionModel::fp,
                 CollisionModel::boltz_mock}) {
    const auto solver = make_solver(m, vg);
    CHECK(solver->model() == m);
    const auto g = maxwellian(MomentVector::from_primitive(1.0, 0.2, 1.1), vg);
    Profile r(g.size());
    solver->rate(g, r);
    double mass = 0.0;
    for (double x : r) mass += x;
    CHECK(std::abs(mass) < 1e-12);
  }
  const EsBgkSolver es(vg);
  Profile out(vg.size());
  CHECK_THROWS_AS(es.resolve(out, 0.1, out), ConfigError);
}
