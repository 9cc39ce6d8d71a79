#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kinex/collision.hpp"
#include "kinex/errors.hpp"
#include "kinex/moments.hpp"
#include "kinex/transport.hpp"

using namespace kinex;

namespace {

constexpr double kPi = std::numbers::pi;

// Exact cell averages of sin(pi x) + 2 and of its x-derivative.
DistributionField sine_averages(const SpatialGrid& g, std::size_t nv) {
  DistributionField f(g.nx, nv);
  for (int j = 0; j < g.nx; ++j) {
    const double a = g.xlo + j * g.dx, b = a + g.dx;
    const double avg = 2.0 + (std::cos(kPi * a) - std::cos(kPi * b)) / (kPi * g.dx);
    for (std::size_t i = 0; i < nv; ++i) f(j, i) = avg;
  }
  return f;
}

double rate_error(TransportKind kind, int nx) {
  const auto g = build_spatial_grid(0.0, 2.0, nx);
  const auto vg = build_velocity_grid(1.0, 2);
  const auto f = sine_averages(g, vg.size());
  DistributionField r;
  TransportOperator(kind, false, g, vg).rate(f, r);
  double err = 0.0;
  for (int j = 0; j < nx; ++j) {
    const double a = g.xlo + j * g.dx, b = a + g.dx;
    // -v d/dx of the average is -v (f(b) - f(a)) / dx.
    const double exact_dx = (std::sin(kPi * b) - std::sin(kPi * a)) / g.dx;
    for (std::size_t i = 0; i < vg.size(); ++i)
      err = std::max(err, std::abs(r(j, i) + vg.points[i] * exact_dx));
  }
  return err;
}

}  // namespace

TEST_CASE("transport of constant data vanishes") {
  const auto g = build_spatial_grid(0.0, 2.0, 12);
  const auto vg = build_velocity_grid(5.0, 10);
  const DistributionField f(12, vg.size(), 0.7);
  for (const auto& r : {upwind_apply(f, g, vg), weno5_apply(f, g, vg), weno5_apply(f, g, vg, true)})
    for (double x : r.values()) CHECK(std::abs(x) < 1e-13);
}

TEST_CASE("transport is conservative on a periodic grid") {
  const auto g = build_spatial_grid(0.0, 2.0, 20);
  const auto vg = build_velocity_grid(3.0, 6);
  DistributionField f(20, vg.size());
  for (int j = 0; j < 20; ++j)
    for (std::size_t i = 0; i < vg.size(); ++i) f(j, i) = 1.0 + 0.5 * std::sin(j + 0.3 * i) + (j == 7);
  for (const auto& r : {upwind_apply(f, g, vg), weno5_apply(f, g, vg, true)}) {
    for (std::size_t i = 0; i < vg.size(); ++i) {
      double total = 0.0;
      for (int j = 0; j < 20; ++j) total += r(j, i);
      CHECK(std::abs(total) < 1e-12);
    }
  }
}

TEST_CASE("spatial convergence rates") {
  const double up = std::log2(rate_error(TransportKind::upwind1, 80) /
                              rate_error(TransportKind::upwind1, 160));
  CHECK(up == doctest::Approx(1.0).epsilon(0.05));
  const double weno = std::log2(rate_error(TransportKind::weno5, 80) /
                                rate_error(TransportKind::weno5, 160));
  CHECK(weno > 4.5);
}

TEST_CASE("upwind forward Euler is positive at the CFL limit") {
  const auto g = build_spatial_grid(0.0, 2.0, 30);
  const auto vg = build_velocity_grid(4.0, 8);
  DistributionField f(30, vg.size(), 0.0);
  for (std::size_t i = 0; i < vg.size(); ++i) f(10, i) = 1.0;
  const TransportOperator op(TransportKind::upwind1, false, g, vg);
  DistributionField r;
  op.rate(f, r);
  const double dt = op.dt_fe();
  CHECK(dt == doctest::Approx(g.dx / vg.vmax));
  for (int j = 0; j < 30; ++j)
    for (std::size_t i = 0; i < vg.size(); ++i) CHECK(f(j, i) + dt * r(j, i) >= 0.0);
}

TEST_CASE("limited WENO forward Euler is positive at its CFL limit") {
  const auto g = build_spatial_grid(0.0, 2.0, 40);
  const auto vg = build_velocity_grid(4.0, 8);
  DistributionField f(40, vg.size(), 0.0);
  for (int j = 15; j < 25; ++j)
    for (std::size_t i = 0; i < vg.size(); ++i) f(j, i) = 1.0 + 0.5 * (j % 3);
  const TransportOperator op(TransportKind::weno5, true, g, vg);
  DistributionField r;
  op.rate(f, r);
  CHECK(op.last_limited() > 0);
  const double dt = op.dt_fe();
  CHECK(dt == doctest::Approx(g.dx / (12.0 * vg.vmax)));
  for (int j = 0; j < 40; ++j)
    for (std::size_t i = 0; i < vg.size(); ++i) CHECK(f(j, i) + dt * r(j, i) >= 0.0);

  // Without the limiter the same step undershoots.
  const TransportOperator raw(TransportKind::weno5, false, g, vg);
  raw.rate(f, r);
  double lowest = 0.0;
  for (int j = 0; j < 40; ++j)
    for (std::size_t i = 0; i < vg.size(); ++i) lowest = std::min(lowest, f(j, i) + dt * r(j, i));
  CHECK(lowest < 0.0);
}

TEST_CASE("Dirichlet ghosts feed the boundary fluxes") {
  const auto g = build_spatial_grid(0.0, 2.0, 10, BoundaryKind::dirichlet);
  const auto vg = build_velocity_grid(1.0, 2);
  const DistributionField f(10, 2, 1.0);
  const auto ghosts = BoundaryGhosts::from_field_edges(f);
  const TransportOperator op(TransportKind::weno5, true, g, vg, ghosts);
  DistributionField r;
  op.rate(f, r);
  for (double x : r.values()) CHECK(std::abs(x) < 1e-14);

  std::vector<double> col(16);
  auto left = std::vector<Profile>(3, Profile{2.0, 2.0});
  auto right = std::vector<Profile>(3, Profile{3.0, 3.0});
  BoundaryGhosts::dirichlet(left, right).extended_column(f, 0, col);
  CHECK(col[0] == 2.0);
  CHECK(col[3] == 1.0);
  CHECK(col[15] == 3.0);
}

TEST_CASE("degree-4 reconstruction reproduces quartics") {
  // p(x) = 1 + x - 2x^2 + 0.5x^3 + 0.3x^4 on cells of unit width.
  auto P = [](double x) {
    return x + x * x / 2.0 - 2.0 * x * x * x / 3.0 + 0.125 * std::pow(x, 4) + 0.06 * std::pow(x, 5);
  };
  auto p = [](double x) { return 1.0 + x - 2.0 * x * x + 0.5 * x * x * x + 0.3 * std::pow(x, 4); };
  std::array<double, 5> avg{};
  for (int k = 0; k < 5; ++k) avg[static_cast<std::size_t>(k)] = P(k - 1.5) - P(k - 2.5);
  const auto cell = reconstruct(avg);
  const auto& xs = check_point_offsets();
  for (std::size_t q = 0; q < xs.size(); ++q) CHECK(cell.values[q] == doctest::Approx(p(xs[q])).epsilon(1e-12));

  // The Gauss-point values integrate back to the cell average.
  double mean = 0.0;
  for (std::size_t l = 0; l < 3; ++l) mean += CellQuadrature::weights[l] * cell.values[l];
  CHECK(mean == doctest::Approx(avg[2]).epsilon(1e-13));
}

TEST_CASE("scaling limiter") {
  CellPointValues ok;
  ok.average = 1.0;
  ok.values = {0.5, 1.0, 1.5, 0.2, 1.8};
  const auto before = ok.values;
  CHECK(positivity_limit(ok) == 1.0);
  CHECK(ok.values == before);

  CellPointValues cell;
  cell.average = 1.0;
  cell.values = {-1.0, 1.0, 3.0, 0.0, 2.0};
  CHECK(positivity_limit(cell) == doctest::Approx(0.5));
  for (double v : cell.values) CHECK(v >= 0.0);
  CHECK(cell.values[0] == doctest::Approx(0.0));
  CHECK(cell.values[2] == doctest::Approx(2.0));

  CellPointValues bad;
  bad.average = -0.1;
  CHECK_THROWS_AS(positivity_limit(bad), InvalidStateError);
}

TEST_CASE("Gauss-point collision averaging") {
  const auto g = build_spatial_grid(0.0, 2.0, 8);
  const auto vg = build_velocity_grid(8.0, 40);
  const BgkSolver solver(vg);
  DistributionField f(8, vg.size());
  for (int j = 0; j < 8; ++j) {
    const auto a = maxwellian(MomentVector::from_primitive(1.0 + 0.1 * j, 0.5, 1.0), vg);
    const auto b = maxwellian(MomentVector::from_primitive(0.5, -1.0, 0.4), vg);
    for (std::size_t i = 0; i < vg.size(); ++i) f(j, i) = a[i] + b[i];
  }
  const auto eps = EpsilonField::constant(g, 0.5);

  DistributionField out;
  gauss_point_collision(f, eps, 0.0, solver, ReconstructionKind::degree4,
                        BoundaryGhosts::periodic(), out);
  CHECK(std::equal(out.values().begin(), out.values().end(), f.values().begin()));

  // Piecewise-constant data: every Gauss point sees the cell average.
  DistributionField flat(8, vg.size());
  for (int j = 0; j < 8; ++j)
    for (std::size_t i = 0; i < vg.size(); ++i) flat(j, i) = f(3, i);
  gauss_point_collision(flat, eps, 0.2, solver, ReconstructionKind::degree4,
                        BoundaryGhosts::periodic(), out);
  const auto direct = solver.apply(flat.row(3), 0.2 / 0.5);
  for (int j = 0; j < 8; ++j)
    for (std::size_t i = 0; i < vg.size(); ++i)
      CHECK(out(j, i) == doctest::Approx(direct[i]).epsilon(1e-13).scale(1e-14));

  gauss_point_collision(f, eps, 0.2, solver, ReconstructionKind::piecewise_constant,
                        BoundaryGhosts::periodic(), out);
  const auto cell5 = solver.apply(f.row(5), 0.4);
  for (std::size_t i = 0; i < vg.size(); ++i) CHECK(out(5, i) == doctest::Approx(cell5[i]));

  // Mass is conserved cell by cell for the degree-4 path too.
  const auto mixed = EpsilonField::mixed_regime(g, 1e-3);
  gauss_point_collision(f, mixed, 0.05, solver, ReconstructionKind::degree4,
                        BoundaryGhosts::periodic(), out);
  for (int j = 0; j < 8; ++j) {
    const auto d = moment_drift(f.row(j), out.row(j), vg);
    CHECK(d[0] < 1e-11);
  }
  CHECK(out.count_negative() == 0);
}
