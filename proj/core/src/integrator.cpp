#include "kinex/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace kinex {

SchemeCoefficients SchemeCoefficients::standard() { return {}; }

SchemeCoefficients SchemeCoefficients::strang() {
  return {0.5, 0.0, 0.5, 1.0, 1.0, 0.5};
}

SchemeCoefficients SchemeCoefficients::transport_exp() {
  return {0.0, 1.0, 0.0, 1.0, 1.0, 0.5};
}

SchemeCoefficients SchemeCoefficients::from_w(double w, double a0, double a1, double a2) {
  const auto [b1, b2] = b_from_w(w);
  return {a0, a1, a2, b1, b2, w};
}

bool SchemeCoefficients::positivity_ok() const {
  return a0 >= 0.0 && a1 >= 0.0 && b1 >= 0.0 && b2 >= 0.0 && a2 >= 0.0 && a2 <= 1.0 &&
         w >= 0.0 && w <= 1.0;
}

bool SchemeCoefficients::ap_ok() const {
  return a0 > 0.0 && a1 > 0.0 && a2 > 0.0 && a2 < 1.0;
}

bool SchemeCoefficients::second_order(double tol) const {
  const auto r = verify_order_conditions(*this);
  return std::all_of(r.begin(), r.end(), [tol](double x) { return std::abs(x) <= tol; });
}

std::array<double, 4> verify_order_conditions(const SchemeCoefficients& c) {
  return {c.a0 + c.a1 + c.a2 - 1.0, c.w * (c.b1 + c.b2) - 1.0, c.w * c.b1 * c.b2 - 0.5,
          c.w * (c.b2 * c.a1 + (c.b1 + c.b2) * c.a0) - 0.5};
}

std::pair<double, double> b_from_w(double w) {
  if (!(w > 0.0 && w <= 0.5)) throw DomainError("w must lie in (0, 1/2]");
  const double r = std::sqrt(1.0 - 2.0 * w);
  return {1.0 / (1.0 + r), 1.0 / (1.0 - r)};
}

std::string_view to_string(IntegratorKind k) {
  switch (k) {
    case IntegratorKind::exprk2: return "exprk2";
    case IntegratorKind::ssprk2_explicit: return "ssprk2-explicit";
    case IntegratorKind::strang: return "strang";
    case IntegratorKind::transport_exp: return "transport-exp";
    case IntegratorKind::ars222: return "ars222";
  }
  return "unknown";
}

IntegratorKind parse_integrator_kind(std::string_view name) {
  if (name == "exprk2") return IntegratorKind::exprk2;
  if (name == "ssprk2-explicit" || name == "ssprk2") return IntegratorKind::ssprk2_explicit;
  if (name == "strang") return IntegratorKind::strang;
  if (name == "transport-exp") return IntegratorKind::transport_exp;
  if (name == "ars222") return IntegratorKind::ars222;
  throw ConfigError("unknown integrator '" + std::string(name) +
                    "' (expected exprk2, ssprk2-explicit, strang, transport-exp or ars222)");
}

SchemeCoefficients coefficients_for(IntegratorKind k) {
  switch (k) {
    case IntegratorKind::exprk2: return SchemeCoefficients::standard();
    case IntegratorKind::strang: return SchemeCoefficients::strang();
    case IntegratorKind::transport_exp: return SchemeCoefficients::transport_exp();
    default: break;
  }
  throw ConfigError("integrator " + std::string(to_string(k)) +
                    " is not an exponential Runge-Kutta variant");
}

namespace {

void require_context(const StepContext& ctx) {
  if (!ctx.solver) throw ConfigError("step context has no collision solver");
  if (!ctx.eps) throw ConfigError("step context has no Knudsen field");
}

void transport_rate(const DistributionField& f, const StepContext& ctx,
                    DistributionField& out) {
  if (ctx.transport) {
    ctx.transport->rate(f, out);
  } else {
    out = DistributionField(f.nx(), f.nv(), 0.0);
  }
}

void collide(const DistributionField& f, double s, const StepContext& ctx,
             DistributionField& out) {
  gauss_point_collision(f, *ctx.eps, s, *ctx.solver, ctx.recon, ctx.ghosts, out);
}

void check_stage(const DistributionField& f, const StepContext& ctx, const char* stage) {
  if (!ctx.enforce_positivity) return;
  const double m = f.min_value();
  if (m < -ctx.positivity_tol)
    throw PositivityViolation(std::string("stage ") + stage + " reached " +
                              std::to_string(m) + " (tolerance " +
                              std::to_string(ctx.positivity_tol) + ")");
  if (!f.all_finite())
    throw NumericalError(std::string("stage ") + stage + " produced non-finite values");
}

void axpy(double a, const DistributionField& x, DistributionField& y) {
  auto xv = x.values();
  auto yv = y.values();
  for (std::size_t k = 0; k < yv.size(); ++k) yv[k] += a * xv[k];
}

}  // namespace

DistributionField exprk2_step(const DistributionField& fn, double dt,
                              const StepContext& ctx, StageMoments* moments,
                              double pending_collision) {
  require_context(ctx);
  const SchemeCoefficients& c = ctx.coeffs;
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  if (ctx.enforce_cfl && ctx.transport) {
    const double bound = ctx.transport->dt_fe() / std::max(c.b1, c.b2);
    if (dt > bound * (1.0 + 1e-12))
      throw CflViolation("dt = " + std::to_string(dt) + " exceeds the positivity bound " +
                         std::to_string(bound));
  }

  const auto tag = [](const char* stage, const Error& e) {
    return std::string(stage) + ": " + e.what();
  };

  DistributionField f0, rate, f1, f2, h, out;
  try {
    collide(fn, pending_collision + c.a0 * dt, ctx, f0);
  } catch (const NumericalError& e) {
    throw NumericalError(tag("stage 0 collision", e));
  }
  check_stage(f0, ctx, "0");

  transport_rate(f0, ctx, rate);
  DistributionField g1 = f0;
  axpy(c.b1 * dt, rate, g1);
  check_stage(g1, ctx, "1 transport");
  try {
    collide(g1, c.a1 * dt, ctx, f1);
  } catch (const NumericalError& e) {
    throw NumericalError(tag("stage 1 collision", e));
  }

  transport_rate(f1, ctx, rate);
  f2 = f1;
  axpy(c.b2 * dt, rate, f2);
  check_stage(f2, ctx, "2 transport");

  try {
    collide(fn, pending_collision + (1.0 - c.a2) * dt, ctx, h);
  } catch (const NumericalError& e) {
    throw NumericalError(tag("branch collision", e));
  }
  DistributionField g(fn.nx(), fn.nv());
  linear_combination(c.w, f2, 1.0 - c.w, h, g);

  if (ctx.fusion) {
    out = std::move(g);
  } else {
    try {
      collide(g, c.a2 * dt, ctx, out);
    } catch (const NumericalError& e) {
      throw NumericalError(tag("final collision", e));
    }
  }

  if (moments) {
    moments->initial = field_moments(fn, ctx.grid, ctx.vgrid);
    moments->stage0 = field_moments(f0, ctx.grid, ctx.vgrid);
    moments->stage2 = field_moments(f2, ctx.grid, ctx.vgrid);
    moments->final = field_moments(out, ctx.grid, ctx.vgrid);
  }
  return out;
}

void collision_rate(const DistributionField& f, const StepContext& ctx,
                    DistributionField& out) {
  require_context(ctx);
  const int nx = f.nx();
  const std::size_t nv = f.nv();
  if (!out.same_shape(f)) out = DistributionField(nx, nv);
  Profile tmp(nv);
  if (ctx.recon == ReconstructionKind::piecewise_constant && ctx.eps->is_constant()) {
    for (int j = 0; j < nx; ++j) {
      ctx.solver->rate(f.row(j), out.row(j));
      const double inv = 1.0 / ctx.eps->center(j);
      for (double& x : out.row(j)) x *= inv;
    }
    return;
  }
  std::array<DistributionField, 3> pts;
  if (ctx.recon == ReconstructionKind::degree4) {
    pts = build_reconstruction(f, ctx.ghosts).points;
  } else {
    pts = {f, f, f};
  }
  for (int j = 0; j < nx; ++j) {
    auto row = out.row(j);
    std::fill(row.begin(), row.end(), 0.0);
    for (int l = 0; l < 3; ++l) {
      const auto lu = static_cast<std::size_t>(l);
      ctx.solver->rate(pts[lu].row(j), tmp);
      const double w = CellQuadrature::weights[lu] / ctx.eps->at(j, l);
      for (std::size_t i = 0; i < nv; ++i) row[i] += w * tmp[i];
    }
  }
}

DistributionField ssprk2_explicit_step(const DistributionField& fn, double dt,
                                       const StepContext& ctx) {
  require_context(ctx);
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  DistributionField tr, col;
  auto rhs = [&](const DistributionField& f, DistributionField& out) {
    transport_rate(f, ctx, tr);
    collision_rate(f, ctx, col);
    out = tr;
    axpy(1.0, col, out);
  };
  auto guard = [](const DistributionField& f, const char* stage) {
    for (double x : f.values())
      if (!(std::abs(x) <= kBlowUpThreshold))
        throw NumericalError(std::string("explicit SSP-RK2 blew up at ") + stage +
                             " (|f| > 1e10); reduce dt");
  };
  DistributionField k;
  rhs(fn, k);
  DistributionField fs = fn;
  axpy(dt, k, fs);
  guard(fs, "stage 1");
  rhs(fs, k);
  axpy(dt, k, fs);
  DistributionField out(fn.nx(), fn.nv());
  linear_combination(0.5, fn, 0.5, fs, out);
  guard(out, "stage 2");
  return out;
}

DistributionField ars222_step(const DistributionField& fn, double dt,
                              const StepContext& ctx) {
  require_context(ctx);
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  const double gamma = 1.0 - 1.0 / std::sqrt(2.0);
  const double delta = 1.0 - 1.0 / (2.0 * gamma);
  const int nx = fn.nx();

  auto implicit_stage = [&](const DistributionField& rhs, DistributionField& out) {
    if (!out.same_shape(rhs)) out = DistributionField(nx, rhs.nv());
    for (int j = 0; j < nx; ++j)
      ctx.solver->resolve(rhs.row(j), gamma * dt / ctx.eps->center(j), out.row(j));
  };

  DistributionField t0, t2, f2, f3;
  transport_rate(fn, ctx, t0);
  DistributionField rhs2 = fn;
  axpy(gamma * dt, t0, rhs2);
  implicit_stage(rhs2, f2);

  // Q(F2)/eps from the stage identity F2 = rhs2 + gamma dt Q(F2)/eps.
  DistributionField k2(nx, fn.nv());
  linear_combination(1.0 / (gamma * dt), f2, -1.0 / (gamma * dt), rhs2, k2);

  transport_rate(f2, ctx, t2);
  DistributionField rhs3 = fn;
  axpy(delta * dt, t0, rhs3);
  axpy((1.0 - delta) * dt, t2, rhs3);
  axpy((1.0 - gamma) * dt, k2, rhs3);
  implicit_stage(rhs3, f3);
  return f3;
}

SimulationState run_simulation(const DistributionField& initial, const StepContext& ctx,
                               const RunOptions& opts) {
  require_context(ctx);
  if (!(opts.t_final >= 0.0)) throw ConfigError("t_final must be nonnegative");
  if (opts.t_final > 0.0 && !(opts.dt > 0.0)) throw ConfigError("time step must be positive");
  if (opts.t_final > 0.0 && opts.t_final / opts.dt > static_cast<double>(opts.max_steps))
    throw ConfigError("run needs more than max_steps steps");

  auto state = std::make_shared<SimulationState>();
  state->f = initial;
  state->initial_moments = field_moments(initial, ctx.grid, ctx.vgrid);
  const bool initial_ok = initial.count_negative() == 0;
  if (opts.record_entropy && initial_ok)
    state->initial_entropy = discrete_entropy(initial, ctx.grid, ctx.vgrid);

  StepContext step_ctx = ctx;
  if (opts.kind != IntegratorKind::ssprk2_explicit && opts.kind != IntegratorKind::ars222)
    step_ctx.coeffs = coefficients_for(opts.kind);
  const bool fused = step_ctx.fusion && opts.kind != IntegratorKind::ssprk2_explicit &&
                     opts.kind != IntegratorKind::ars222;
  step_ctx.fusion = fused;

  auto abort = [&](const std::string& what) {
    auto snap = std::make_shared<const SimulationState>(*state);
    throw SimulationAborted("step " + std::to_string(state->steps + 1) + " at t = " +
                                std::to_string(state->t) + ": " + what,
                            std::move(snap));
  };

  while (state->t < opts.t_final) {
    double dt = opts.dt;
    const double remaining = opts.t_final - state->t;
    if (dt >= remaining * (1.0 - 1e-12)) dt = remaining;

    DistributionField next;
    try {
      switch (opts.kind) {
        case IntegratorKind::ssprk2_explicit:
          next = ssprk2_explicit_step(state->f, dt, step_ctx);
          break;
        case IntegratorKind::ars222:
          next = ars222_step(state->f, dt, step_ctx);
          break;
        default: {
          next = exprk2_step(state->f, dt, step_ctx, nullptr, state->pending_collision);
          state->pending_collision = fused ? step_ctx.coeffs.a2 * dt : 0.0;
          break;
        }
      }
    } catch (const NumericalError& e) {
      abort(e.what());
    }

    const bool last = dt == remaining;
    if (last && state->pending_collision > 0.0) {
      DistributionField flushed;
      gauss_point_collision(next, *ctx.eps, state->pending_collision, *ctx.solver,
                            ctx.recon, ctx.ghosts, flushed);
      next = std::move(flushed);
      state->pending_collision = 0.0;
    }

    state->f = std::move(next);
    state->t = last ? opts.t_final : state->t + dt;
    ++state->steps;

    StepRecord rec;
    rec.step = state->steps;
    rec.time = state->t;
    rec.dt = dt;
    rec.negative_cells = state->f.count_negative();
    if (opts.record_entropy && rec.negative_cells == 0) {
      rec.entropy = discrete_entropy(state->f, ctx.grid, ctx.vgrid);
    } else {
      rec.entropy = std::numeric_limits<double>::quiet_NaN();
    }
    state->history.push_back(rec);
    if (!state->f.all_finite()) abort("state became non-finite");
  }
  state->drift = relative_drift(state->initial_moments,
                                field_moments(state->f, ctx.grid, ctx.vgrid));
  return std::move(*state);
}

}  // namespace kinex
