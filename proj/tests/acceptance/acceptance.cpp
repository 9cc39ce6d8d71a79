// Acceptance suite: one PASS/FAIL line per criterion.
//
// Usage: kinex_acceptance [criterion ...]   (no arguments runs all twelve)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "kinex/collision.hpp"
#include "kinex/harness.hpp"
#include "kinex/integrator.hpp"
#include "kinex/moments.hpp"

using namespace kinex;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, x);
  return buf;
}

std::string sci(double x) { return fmt("%.3e", x); }

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

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

// Smallest log2(e(s) / e(s/2)) over a halving sequence in the asymptotic range.
double local_error_slope(const HomogeneousSolver& solver, const Profile& g) {
  double prev = 0.0, slope = INFINITY;
  for (double s : {0.1, 0.05, 0.025, 0.0125}) {
    const double err = max_abs_diff(solver.apply(g, s), rk4(solver, g, s, 400));
    if (prev > 0.0) slope = std::min(slope, std::log2(prev / err));
    prev = err;
  }
  return slope;
}

// ------------------------------------------------------------------ criteria

Outcome order_conditions() {
  const auto c = SchemeCoefficients::standard();
  double worst = 0.0;
  for (double r : verify_order_conditions(c)) worst = std::max(worst, std::abs(r));
  const bool ok = worst == 0.0 && c.positivity_ok() && c.ap_ok();
  return {ok, "max residual " + sci(worst) + ", positivity " + (c.positivity_ok() ? "yes" : "no") +
                  ", AP " + (c.ap_ok() ? "yes" : "no")};
}

std::vector<AccuracyRow> bgk_accuracy(IntegratorKind kind, double eps) {
  AccuracyOptions opts;
  opts.integrator = kind;
  opts.nv = 150;
  return experiment_accuracy(CollisionModel::bgk, {eps}, {160, 320, 640}, opts);
}

Outcome kinetic_convergence() {
  const double p = finest_order(bgk_accuracy(IntegratorKind::exprk2, 1.0), 1.0);
  return {p >= 1.8 && p <= 2.2, "BGK eps=1 order " + fmt("%.3f", p)};
}

// Shared by the fluid-regime and Strang criteria.
double fluid_exprk2_order() {
  static const double p = finest_order(bgk_accuracy(IntegratorKind::exprk2, 1e-10), 1e-10);
  return p;
}

Outcome fluid_convergence() {
  const double p = fluid_exprk2_order();
  return {p >= 1.8 && p <= 2.2, "BGK eps=1e-10 order " + fmt("%.3f", p)};
}

Outcome fp_convergence() {
  AccuracyOptions opts;
  opts.nv = 300;
  bool ok = true;
  std::string detail;
  for (double eps : {1.0, 1e-7}) {
    const auto rows = experiment_accuracy(CollisionModel::fp, {eps}, {160, 320, 640}, opts);
    const double p = finest_order(rows, eps);
    ok = ok && p >= 1.7 && p <= 2.3;
    detail += (detail.empty() ? "" : ", ") + std::string("FP eps=") + fmt("%g", eps) +
              " order " + fmt("%.3f", p);
  }
  return {ok, detail};
}

Outcome positivity() {
  const std::vector<double> eps = {1.0, 1e-4, 1e-8};
  bool ok = true;
  std::string detail;
  for (auto model : {CollisionModel::bgk, CollisionModel::fp}) {
    const auto rows = experiment_positivity(model, eps, {IntegratorKind::exprk2});
    std::size_t worst = 0;
    for (double e : eps) worst = std::max(worst, max_negative_cells(rows, IntegratorKind::exprk2, e));
    ok = ok && worst == 0 && !rows.empty();
    detail += (detail.empty() ? "" : ", ") + std::string(to_string(model)) +
              " max negatives " + std::to_string(worst);
  }
  return {ok, detail};
}

Outcome baseline_negativity() {
  const std::vector<double> eps = {1e-6, 1e-8};
  const auto rows = experiment_positivity(CollisionModel::fp, eps, {IntegratorKind::ars222});
  bool ok = true;
  std::string detail;
  for (double e : eps) {
    const std::size_t n = max_negative_cells(rows, IntegratorKind::ars222, e);
    ok = ok && n >= 1;
    detail += (detail.empty() ? "" : ", ") + std::string("eps=") + fmt("%g", e) +
              " max negatives " + std::to_string(n);
  }
  return {ok, "ARS(2,2,2) FP " + detail};
}

// Largest per-cell |lhs - rhs| over (mass, momentum, energy), scaled by the
// cell mass.
double moment_mismatch(const std::vector<ConservedMoments>& lhs,
                       const std::vector<ConservedMoments>& rhs) {
  double worst = 0.0;
  for (std::size_t j = 0; j < lhs.size(); ++j) {
    const double scale = std::abs(rhs[j].mass);
    worst = std::max({worst, std::abs(lhs[j].mass - rhs[j].mass) / scale,
                      std::abs(lhs[j].momentum[0] - rhs[j].momentum[0]) / scale,
                      std::abs(lhs[j].energy - rhs[j].energy) / scale});
  }
  return worst;
}

std::vector<ConservedMoments> cell_moments(const DistributionField& f, const VelocityGrid& vg) {
  std::vector<ConservedMoments> out;
  for (int j = 0; j < f.nx(); ++j) out.push_back(conserved_moments(f.row(j), vg));
  return out;
}

// a + c * b, cell by cell.
std::vector<ConservedMoments> axpy(const std::vector<ConservedMoments>& a, double c,
                                   const std::vector<ConservedMoments>& b) {
  auto out = a;
  for (std::size_t j = 0; j < a.size(); ++j) {
    out[j].mass += c * b[j].mass;
    out[j].momentum += c * b[j].momentum;
    out[j].energy += c * b[j].energy;
  }
  return out;
}

std::vector<ConservedMoments> scaled(const std::vector<ConservedMoments>& a, double c) {
  return axpy(a, c - 1.0, a);
}

double distance_to_maxwellian(const DistributionField& f, const VelocityGrid& vg) {
  double worst = 0.0;
  for (int j = 0; j < f.nx(); ++j)
    worst = std::max(worst, max_abs_diff(f.row(j), maxwellian(compute_moments(f.row(j), vg), vg)));
  return worst;
}

Outcome ap_limit() {
  ProblemSpec spec;
  spec.transport = TransportKind::upwind1;
  spec.eps = 1e-12;
  const Problem p(spec);
  const StepContext ctx = p.context();
  const auto& vg = p.vgrid();
  const auto& c = ctx.coeffs;
  const double dt = p.timestep(0.5);
  const DistributionField& fn = p.initial();

  const DistributionField out = exprk2_step(fn, dt, ctx);
  const double dist = distance_to_maxwellian(out, vg);

  // Stages rebuilt from the public operators.
  auto collide = [&](const DistributionField& f, double s) {
    DistributionField r;
    gauss_point_collision(f, p.eps(), s, p.solver(), ctx.recon, ctx.ghosts, r);
    return r;
  };
  DistributionField tf0, tf1, tmp, f2, mix;
  const DistributionField f0 = collide(fn, c.a0 * dt);
  p.transport().rate(f0, tf0);
  linear_combination(1.0, f0, c.b1 * dt, tf0, tmp);
  const DistributionField f1 = collide(tmp, c.a1 * dt);
  p.transport().rate(f1, tf1);
  linear_combination(1.0, f1, c.b2 * dt, tf1, f2);
  linear_combination(c.w, f2, 1.0 - c.w, collide(fn, (1.0 - c.a2) * dt), mix);
  const DistributionField rebuilt = collide(mix, c.a2 * dt);

  const auto un = cell_moments(fn, vg), u0 = cell_moments(f0, vg), u1 = cell_moments(f1, vg),
             u2 = cell_moments(f2, vg), u3 = cell_moments(out, vg);
  const auto t0 = cell_moments(tf0, vg), t1 = cell_moments(tf1, vg);
  const double id0 = moment_mismatch(u0, un);
  const double id1 = moment_mismatch(u1, axpy(u0, c.b1 * dt, t0));
  const double id2 = moment_mismatch(u2, axpy(u1, c.b2 * dt, t1));
  const double id3 = moment_mismatch(u3, axpy(scaled(u2, c.w), 1.0 - c.w, un));
  const double ident = std::max({id0, id1, id2, id3});
  const double same = max_abs_diff(rebuilt.values(), out.values());

  const bool ok = dist <= 1e-10 && ident <= 1e-12 && same <= 1e-14;
  return {ok, "||f - M|| " + sci(dist) + ", stage identities " + sci(ident) +
                  ", rebuilt step " + sci(same)};
}

Outcome mixed_regime() {
  bool ok = true;
  std::string detail;
  const char* names[3] = {"rho", "u", "T"};
  for (auto model : {CollisionModel::bgk, CollisionModel::fp}) {
    const auto r = experiment_mixed_regime(model);
    ok = ok && r.pass();
    detail += (detail.empty() ? "" : "; ") + std::string(to_string(model)) + ":";
    for (std::size_t q = 0; q < 3; ++q)
      detail += std::string(" ") + names[q] + " " + sci(r.discrepancy[q]) + "/" + sci(r.tolerance[q]);
  }
  return {ok, detail + " (discrepancy/tolerance)"};
}

Outcome entropy_decay() {
  bool ok = true;
  double worst = -INFINITY;
  std::size_t steps = 0;
  for (auto model : {CollisionModel::bgk, CollisionModel::fp}) {
    for (double eps : {1.0, 1e-4}) {
      ProblemSpec spec;
      spec.model = model;
      spec.transport = TransportKind::upwind1;
      spec.eps = eps;
      const Problem p(spec);
      RunOptions opts;
      opts.dt = p.timestep(0.5);
      opts.t_final = 0.1;
      const auto s = run_simulation(p.initial(), p.context(), opts);
      double prev = s.initial_entropy;
      for (const auto& rec : s.history) {
        const double rise = (rec.entropy - prev) / std::max(1.0, std::abs(prev));
        worst = std::max(worst, rise);
        if (!(rise <= 1e-12)) ok = false;
        prev = rec.entropy;
      }
      steps += s.history.size();
      ok = ok && !s.history.empty();
    }
  }
  return {ok, std::to_string(steps) + " steps, largest relative rise " + sci(worst)};
}

Outcome conservation() {
  const auto vg = build_velocity_grid(15.0, 150);
  const auto vg2 = build_velocity_grid(12.0, 60, 2);
  const Profile g = bimodal_profile(vg);
  const Profile g2 = bimodal_profile(vg2);
  double bgk = 0.0, es = 0.0, fp_mass = 0.0;
  for (double s : {0.1, 1.0, 10.0}) {
    for (double d : moment_drift(g, bgk_exp(g, s, 1.0, vg), vg)) bgk = std::max(bgk, d);
    for (double d : moment_drift(g2, esbgk_exp(g2, s, 1.0, -0.5, vg2), vg2)) es = std::max(es, d);
    fp_mass = std::max(fp_mass, moment_drift(g, fp_exp(g, s, vg), vg)[0]);
  }
  // FP momentum and energy drift under dv -> dv/2.
  double ratio = INFINITY;
  {
    const auto fine = build_velocity_grid(15.0, 300);
    const Profile gf = bimodal_profile(fine);
    const auto coarse_drift = moment_drift(g, fp_exp(g, 1.0, vg), vg);
    const auto fine_drift = moment_drift(gf, fp_exp(gf, 1.0, fine), fine);
    for (std::size_t q : {1u, 2u}) ratio = std::min(ratio, coarse_drift[q] / fine_drift[q]);
    fp_mass = std::max(fp_mass, fine_drift[0]);
  }
  const bool ok = bgk <= 1e-12 && es <= 1e-12 && fp_mass <= 1e-12 && ratio >= 3.5;
  return {ok, "BGK " + sci(bgk) + ", ES-BGK " + sci(es) + ", FP mass " + sci(fp_mass) +
                  ", FP (rho u, E) halving ratio " + fmt("%.2f", ratio)};
}

Outcome homogeneous_accuracy() {
  const auto vg2 = build_velocity_grid(12.0, 60, 2);
  const double es_slope = local_error_slope(EsBgkSolver(vg2, 1.0, -0.5), bimodal_profile(vg2));

  const auto vg = build_velocity_grid(15.0, 150);
  const Profile g = bimodal_profile(vg);
  const BoltzmannMidpointSolver boltz(vg, std::make_shared<EsbgkShapedGain>(2.0, 1.0, -0.5));
  const double boltz_slope = local_error_slope(boltz, g);

  double gap = 0.0;
  for (double mu : {0.5, 1.0, 3.0}) {
    const BgkShapedGain gain(mu);
    for (double s : {1e-3, 0.1, 1.0, 10.0})
      gap = std::max(gap, max_abs_diff(boltzmann_expmidpoint(g, s, gain, vg), bgk_exp(g, s, mu, vg)));
  }
  const bool ok = es_slope >= 2.7 && boltz_slope >= 2.7 && gap <= 1e-13;
  return {ok, "ES-BGK slope " + fmt("%.2f", es_slope) + ", Boltzmann slope " +
                  fmt("%.2f", boltz_slope) + ", BGK-shaped gain gap " + sci(gap)};
}

Outcome strang_degeneracy() {
  const double strang = finest_order(bgk_accuracy(IntegratorKind::strang, 1e-10), 1e-10);
  const double exprk2 = fluid_exprk2_order();
  return {strang <= 1.4 && exprk2 >= 1.8,
          "eps=1e-10 strang order " + fmt("%.3f", strang) + ", exprk2 order " + fmt("%.3f", exprk2)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"order conditions", order_conditions},
      {"kinetic-regime convergence", kinetic_convergence},
      {"fluid-regime convergence", fluid_convergence},
      {"Fokker-Planck convergence", fp_convergence},
      {"Sod positivity", positivity},
      {"ARS(2,2,2) negativity", baseline_negativity},
      {"asymptotic-preserving limit", ap_limit},
      {"mixed regime", mixed_regime},
      {"entropy decay", entropy_decay},
      {"conservation", conservation},
      {"homogeneous solver accuracy", homogeneous_accuracy},
      {"Strang degeneracy", strang_degeneracy},
  };

  std::set<int> selected;
  for (int k = 1; k < argc; ++k) {
    const int n = std::atoi(argv[k]);
    if (n < 1 || n > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "unknown criterion '%s'\n", argv[k]);
      return 1;
    }
    selected.insert(n);
  }

  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k + 1);
    if (!selected.empty() && !selected.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome r;
    try {
      r = criteria[k].second();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %2d %s: %s (%.1f s)\n", r.pass ? "PASS" : "FAIL", id, criteria[k].first,
                r.detail.c_str(), secs);
    std::fflush(stdout);
    if (!r.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
