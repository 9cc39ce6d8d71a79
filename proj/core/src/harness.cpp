#include "kinex/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "kinex/errors.hpp"

namespace kinex {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double maxwellian_point(double rho, double u, double T, double v) {
  const double c = v - u;
  return rho / std::sqrt(2.0 * std::numbers::pi * T) * std::exp(-c * c / (2.0 * T));
}

bool is_sod(InitialCondition ic) { return ic == InitialCondition::sod; }

void fill_cell(InitialCondition ic, const SpatialGrid& grid, const VelocityGrid& vgrid,
               double center, std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double v = vgrid.points[i];
    if (is_sod(ic)) {
      out[i] = initial_density(ic, center, v);
    } else {
      double acc = 0.0;
      for (int l = 0; l < 3; ++l) {
        const auto lu = static_cast<std::size_t>(l);
        acc += CellQuadrature::weights[lu] *
               initial_density(ic, center + CellQuadrature::offsets[lu] * grid.dx, v);
      }
      out[i] = acc;
    }
  }
}

SimulationState simulate(const Problem& p, const StepContext& ctx, IntegratorKind kind,
                         double dt, double t_final, bool record_entropy) {
  RunOptions opts;
  opts.kind = kind;
  opts.dt = dt;
  opts.t_final = t_final;
  opts.record_entropy = record_entropy;
  return run_simulation(p.initial(), ctx, opts);
}

MacroProfiles restrict_profiles(const DistributionField& fine, const SpatialGrid& coarse_grid,
                                const VelocityGrid& vgrid) {
  return macro_profiles(restrict_pairs(fine), coarse_grid, vgrid);
}

}  // namespace

double initial_density(InitialCondition ic, double x, double v) {
  if (is_sod(ic)) {
    return x <= 1.0 ? maxwellian_point(1.0, 0.0, 1.0, v)
                    : maxwellian_point(0.125, 0.0, 0.25, v);
  }
  const double rho = 1.0 + 0.2 * std::sin(std::numbers::pi * x);
  const double u = 1.0;
  const double T = 1.0 / rho;
  return 0.5 * maxwellian_point(rho, u, T, v) + 0.3 * maxwellian_point(rho, -0.5 * u, T, v);
}

DistributionField initial_condition(InitialCondition ic, const SpatialGrid& grid,
                                    const VelocityGrid& vgrid) {
  if (vgrid.dim != 1) throw ConfigError("initial conditions need a 1D velocity grid");
  DistributionField f(grid.nx, vgrid.size());
  for (int j = 0; j < grid.nx; ++j) fill_cell(ic, grid, vgrid, grid.center(j), f.row(j));
  return f;
}

BoundaryGhosts initial_ghosts(InitialCondition ic, const SpatialGrid& grid,
                              const VelocityGrid& vgrid) {
  if (!is_sod(ic)) return BoundaryGhosts::periodic();
  constexpr int w = BoundaryGhosts::width;
  std::vector<Profile> left(w, Profile(vgrid.size())), right(w, Profile(vgrid.size()));
  for (int k = 0; k < w; ++k) {
    fill_cell(ic, grid, vgrid, grid.center(k - w), left[static_cast<std::size_t>(k)]);
    fill_cell(ic, grid, vgrid, grid.center(grid.nx + k), right[static_cast<std::size_t>(k)]);
  }
  return BoundaryGhosts::dirichlet(std::move(left), std::move(right));
}

Problem::Problem(const ProblemSpec& spec)
    : spec_(spec),
      grid_(build_spatial_grid(0.0, 2.0, spec.nx,
                               is_sod(spec.initial) ? BoundaryKind::dirichlet
                                                    : BoundaryKind::periodic)),
      vgrid_(build_velocity_grid(spec.vmax, spec.nv)),
      eps_(spec.eps0 > 0.0 ? EpsilonField::mixed_regime(grid_, spec.eps0)
                           : EpsilonField::constant(grid_, spec.eps)),
      solver_(make_solver(spec.model, vgrid_)),
      ghosts_(initial_ghosts(spec.initial, grid_, vgrid_)),
      transport_(std::make_unique<TransportOperator>(spec.transport, spec.limiter, grid_,
                                                     vgrid_, ghosts_)),
      f0_(initial_condition(spec.initial, grid_, vgrid_)) {}

ReconstructionKind Problem::reconstruction() const {
  return spec_.transport == TransportKind::upwind1 ? ReconstructionKind::piecewise_constant
                                                   : ReconstructionKind::degree4;
}

StepContext Problem::context() const {
  StepContext ctx;
  ctx.grid = grid_;
  ctx.vgrid = vgrid_;
  ctx.transport = transport_.get();
  ctx.solver = solver_.get();
  ctx.eps = &eps_;
  ctx.ghosts = ghosts_;
  ctx.recon = reconstruction();
  ctx.enforce_cfl = spec_.limiter;
  ctx.enforce_positivity = false;
  return ctx;
}

double Problem::timestep(double cfl) const { return cfl_timestep(grid_, vgrid_, cfl); }

MacroProfiles macro_profiles(const DistributionField& f, const SpatialGrid& grid,
                             const VelocityGrid& vgrid) {
  MacroProfiles m;
  for (int j = 0; j < f.nx(); ++j) {
    const MomentVector mv = compute_moments(f.row(j), vgrid);
    m.x.push_back(grid.center(j));
    m.rho.push_back(mv.rho);
    m.u.push_back(mv.u[0]);
    m.T.push_back(mv.T);
  }
  return m;
}

DistributionField restrict_pairs(const DistributionField& fine) {
  if (fine.nx() % 2 != 0) throw ConfigError("restriction needs an even cell count");
  DistributionField coarse(fine.nx() / 2, fine.nv());
  for (int j = 0; j < coarse.nx(); ++j)
    for (std::size_t i = 0; i < fine.nv(); ++i)
      coarse(j, i) = 0.5 * (fine(2 * j, i) + fine(2 * j + 1, i));
  return coarse;
}

double self_convergence_error(const DistributionField& coarse,
                              const DistributionField& fine, double dx, double dv) {
  const DistributionField r = restrict_pairs(fine);
  if (!r.same_shape(coarse)) throw ConfigError("fine grid must have twice the cells");
  double acc = 0.0;
  auto a = coarse.values();
  auto b = r.values();
  for (std::size_t k = 0; k < a.size(); ++k) acc += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(acc * dx * dv);
}

double relative_l2(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw ConfigError("profile lengths differ");
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    num += (a[k] - b[k]) * (a[k] - b[k]);
    den += b[k] * b[k];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

std::vector<AccuracyRow> experiment_accuracy(CollisionModel model,
                                             const std::vector<double>& eps_list,
                                             const std::vector<int>& nx_list,
                                             const AccuracyOptions& opts) {
  if (nx_list.size() < 2) throw ConfigError("accuracy study needs at least two grids");
  std::vector<AccuracyRow> rows;
  for (double eps : eps_list) {
    std::vector<DistributionField> finals;
    std::vector<double> dxs;
    double dv = 0.0;
    for (int nx : nx_list) {
      ProblemSpec spec;
      spec.model = model;
      spec.transport = opts.transport;
      spec.limiter = opts.limiter;
      spec.nx = nx;
      spec.nv = opts.nv;
      spec.vmax = opts.vmax;
      spec.eps = eps;
      const Problem p(spec);
      const SimulationState s = simulate(p, p.context(), opts.integrator,
                                         p.timestep(opts.cfl), opts.t_final, false);
      finals.push_back(s.f);
      dxs.push_back(p.grid().dx);
      dv = p.vgrid().dv;
    }
    std::vector<double> errors;
    for (std::size_t k = 0; k + 1 < finals.size(); ++k)
      errors.push_back(self_convergence_error(finals[k], finals[k + 1], dxs[k], dv));
    for (std::size_t k = 0; k < errors.size(); ++k) {
      AccuracyRow row;
      row.eps = eps;
      row.nx = nx_list[k];
      row.error = errors[k];
      row.order = k + 1 < errors.size() ? std::log2(errors[k] / errors[k + 1]) : kNaN;
      rows.push_back(row);
    }
  }
  return rows;
}

double finest_order(const std::vector<AccuracyRow>& rows, double eps) {
  double order = kNaN;
  for (const auto& r : rows)
    if (r.eps == eps && !std::isnan(r.order)) order = r.order;
  return order;
}

std::vector<PositivityRow> experiment_positivity(CollisionModel model,
                                                 const std::vector<double>& eps_list,
                                                 const std::vector<IntegratorKind>& integrators,
                                                 const PositivityOptions& opts) {
  std::vector<PositivityRow> rows;
  for (IntegratorKind kind : integrators) {
    for (double eps : eps_list) {
      ProblemSpec spec;
      spec.model = model;
      spec.initial = InitialCondition::sod;
      spec.transport = opts.transport;
      spec.limiter = opts.limiter;
      spec.nx = opts.nx;
      spec.nv = opts.nv;
      spec.vmax = opts.vmax;
      spec.eps = eps;
      const Problem p(spec);
      const SimulationState s =
          simulate(p, p.context(), kind, p.timestep(opts.cfl), opts.t_final, false);
      for (const auto& rec : s.history)
        rows.push_back({kind, eps, rec.step, rec.time, rec.negative_cells});
    }
  }
  return rows;
}

std::size_t max_negative_cells(const std::vector<PositivityRow>& rows,
                               IntegratorKind integrator, double eps) {
  std::size_t best = 0;
  for (const auto& r : rows)
    if (r.integrator == integrator && r.eps == eps) best = std::max(best, r.negative_cells);
  return best;
}

bool MixedRegimeResult::pass() const {
  if (!calibrated) return false;
  for (std::size_t q = 0; q < 3; ++q)
    if (!(discrepancy[q] <= tolerance[q])) return false;
  return true;
}

double default_eps0(CollisionModel model) {
  return model == CollisionModel::fp ? 5e-4 : 1e-5;
}

double default_reference_cfl(CollisionModel model) {
  return model == CollisionModel::fp ? 1.0 / 540.0 : 1.0 / 240.0;
}

MixedRegimeResult experiment_mixed_regime(CollisionModel model,
                                          const MixedRegimeOptions& opts) {
  if (opts.nx_ref != 2 * opts.nx)
    throw ConfigError("mixed-regime reference grid must have twice the scheme cells");
  const double eps0 = opts.eps0 > 0.0 ? opts.eps0 : default_eps0(model);
  const double ref_cfl = opts.ref_cfl > 0.0 ? opts.ref_cfl : default_reference_cfl(model);

  auto spec_for = [&](int nx) {
    ProblemSpec spec;
    spec.model = model;
    spec.limiter = opts.limiter;
    spec.nx = nx;
    spec.nv = opts.nv;
    spec.vmax = opts.vmax;
    spec.eps0 = eps0;
    return spec;
  };

  MixedRegimeResult out;
  {
    const Problem p(spec_for(opts.nx));
    const SimulationState s = simulate(p, p.context(), IntegratorKind::exprk2,
                                       p.timestep(opts.cfl), opts.t_final, false);
    out.scheme = macro_profiles(s.f, p.grid(), p.vgrid());
  }
  DistributionField ref;
  SpatialGrid coarse_grid = build_spatial_grid(0.0, 2.0, opts.nx);
  SpatialGrid ref_grid = build_spatial_grid(0.0, 2.0, opts.nx_ref);
  VelocityGrid vgrid = build_velocity_grid(opts.vmax, opts.nv);
  {
    const Problem p(spec_for(opts.nx_ref));
    ref = simulate(p, p.context(), IntegratorKind::ssprk2_explicit, p.timestep(ref_cfl),
                   opts.t_final, false)
              .f;
  }
  out.reference = restrict_profiles(ref, coarse_grid, vgrid);
  out.discrepancy = {relative_l2(out.scheme.rho, out.reference.rho),
                     relative_l2(out.scheme.u, out.reference.u),
                     relative_l2(out.scheme.T, out.reference.T)};
  if (opts.calibrate) {
    const Problem p(spec_for(2 * opts.nx_ref));
    const DistributionField fine =
        simulate(p, p.context(), IntegratorKind::ssprk2_explicit, p.timestep(ref_cfl),
                 opts.t_final, false)
            .f;
    const MacroProfiles a = macro_profiles(ref, ref_grid, vgrid);
    const MacroProfiles b = restrict_profiles(fine, ref_grid, vgrid);
    out.reference_discrepancy = {relative_l2(a.rho, b.rho), relative_l2(a.u, b.u),
                                 relative_l2(a.T, b.T)};
    for (std::size_t q = 0; q < 3; ++q) out.tolerance[q] = 3.0 * out.reference_discrepancy[q];
    out.calibrated = true;
  }
  return out;
}

Profile bimodal_profile(const VelocityGrid& vgrid) {
  Profile g(vgrid.size(), 0.0), tmp(vgrid.size());
  const int d = vgrid.dim;
  const struct {
    double rho, u, T;
  } parts[2] = {{0.6, -1.0, 0.5}, {0.4, 1.5, 0.8}};
  for (const auto& part : parts) {
    const MomentVector mv =
        MomentVector::from_primitive(d, part.rho, Eigen::Vector3d(part.u, 0.0, 0.0), part.T);
    maxwellian(mv, vgrid, tmp);
    for (std::size_t k = 0; k < g.size(); ++k) g[k] += tmp[k];
  }
  return g;
}

std::vector<HomogeneousRow> experiment_homogeneous(CollisionModel model,
                                                   const HomogeneousOptions& opts) {
  if (!(opts.sample_dt > 0.0)) throw ConfigError("sample interval must be positive");
  if (opts.dim != 1 && model != CollisionModel::esbgk && model != CollisionModel::bgk)
    throw ConfigError("only bgk and esbgk support dim > 1");
  const VelocityGrid vgrid = build_velocity_grid(opts.vmax, opts.nv, opts.dim);
  const auto solver = make_solver(model, vgrid);

  Profile g = bimodal_profile(vgrid);
  const ConservedMoments c0 = conserved_moments(g, vgrid);
  const MomentVector m0 = compute_moments(g, vgrid);

  // Relaxation rate of Theta_xx toward T.
  double rate = 1.0;
  if (model == CollisionModel::esbgk) {
    const auto& es = static_cast<const EsBgkSolver&>(*solver);
    rate = es.eta() * (1.0 - es.nu());
  } else if (model == CollisionModel::fp) {
    rate = 2.0 / m0.T;
  }

  std::vector<HomogeneousRow> rows;
  auto record = [&](double t) {
    const MomentVector mv = compute_moments(g, vgrid);
    const Profile m = maxwellian(mv, vgrid);
    HomogeneousRow row;
    row.time = t;
    row.entropy = profile_entropy(g, vgrid);
    for (std::size_t k = 0; k < g.size(); ++k)
      row.distance = std::max(row.distance, std::abs(g[k] - m[k]));
    row.drift = relative_drift(c0, conserved_moments(g, vgrid));
    row.theta_xx = mv.theta(0, 0);
    const double decay = std::exp(-rate * t);
    row.theta_xx_exact = decay * m0.theta(0, 0) + (1.0 - decay) * m0.T;
    rows.push_back(row);
  };

  double t = 0.0;
  record(t);
  const auto steps = static_cast<long long>(std::ceil(opts.t_final / opts.sample_dt - 1e-9));
  for (long long k = 1; k <= steps; ++k) {
    const double next = std::min(opts.t_final, static_cast<double>(k) * opts.sample_dt);
    solver->apply(g, next - t, g);
    t = next;
    record(t);
  }
  return rows;
}

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t k = 0; k < table.header.size(); ++k) {
    if (k) out += ',';
    out += table.header[k];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out += ',';
      if (const auto* s = std::get_if<std::string>(&row[k])) {
        out += *s;
      } else if (const auto* d = std::get_if<double>(&row[k])) {
        out += format_double(*d);
      } else {
        out += std::to_string(std::get<long long>(row[k]));
      }
    }
    out += '\n';
  }
  return out;
}

void emit_report(const ExperimentReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
  auto write = [](const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw ConfigError("write failed for " + path.string());
  };
  std::ostringstream manifest;
  manifest << "# kinex " << to_string(report.config.command) << "\n";
  for (const auto& t : report.tables) {
    write(dir / (t.name + ".csv"), to_csv(t));
    manifest << "# output: " << t.name << ".csv\n";
  }
  for (const auto& [k, v] : report.metadata) manifest << "# " << k << ": " << v << "\n";
  manifest << echo_config(report.config);
  write(dir / "manifest.txt", manifest.str());
}

Table accuracy_table(CollisionModel model, const std::vector<AccuracyRow>& rows) {
  Table t{"accuracy", {"model", "eps", "Nx", "error_L2", "observed_order"}, {}};
  for (const auto& r : rows)
    t.rows.push_back({std::string(to_string(model)), r.eps, static_cast<long long>(r.nx),
                      r.error, r.order});
  return t;
}

Table positivity_table(const std::vector<PositivityRow>& rows) {
  Table t{"positivity", {"integrator", "eps", "step", "time", "negative_cells"}, {}};
  for (const auto& r : rows)
    t.rows.push_back({std::string(to_string(r.integrator)), r.eps,
                      static_cast<long long>(r.step), r.time,
                      static_cast<long long>(r.negative_cells)});
  return t;
}

Table mixed_regime_table(const MixedRegimeResult& result) {
  Table t{"mixed_regime", {"x", "rho", "u", "T", "rho_ref", "u_ref", "T_ref"}, {}};
  const auto& s = result.scheme;
  const auto& r = result.reference;
  for (std::size_t j = 0; j < s.x.size(); ++j)
    t.rows.push_back({s.x[j], s.rho[j], s.u[j], s.T[j], r.rho[j], r.u[j], r.T[j]});
  return t;
}

Table homogeneous_table(const std::vector<HomogeneousRow>& rows) {
  Table t{"homogeneous",
          {"time", "entropy", "distance_to_maxwellian", "drift_mass", "drift_momentum",
           "drift_energy", "theta_xx", "theta_xx_exact"},
          {}};
  for (const auto& r : rows)
    t.rows.push_back({r.time, r.entropy, r.distance, r.drift[0], r.drift[1], r.drift[2],
                      r.theta_xx, r.theta_xx_exact});
  return t;
}

namespace {

int resolved_nv(const RunConfig& cfg) {
  if (cfg.nv > 0) return cfg.nv;
  return cfg.command == Subcommand::accuracy && cfg.model == CollisionModel::fp ? 300 : 150;
}

}  // namespace

ExperimentReport run_command(const RunConfig& cfg) {
  validate(cfg);
  ExperimentReport report;
  report.config = cfg;
  const auto start = std::chrono::steady_clock::now();
  const int nv = resolved_nv(cfg);

  switch (cfg.command) {
    case Subcommand::run: {
      ProblemSpec spec;
      spec.model = cfg.model;
      spec.initial = cfg.initial;
      spec.transport = cfg.transport;
      spec.limiter = cfg.limiter;
      spec.nx = cfg.nx.front();
      spec.nv = nv;
      spec.vmax = cfg.vmax;
      spec.eps = cfg.eps.front();
      spec.eps0 = cfg.eps0;
      const Problem p(spec);
      StepContext ctx = p.context();
      const IntegratorKind kind = cfg.integrators.front();
      ctx.enforce_positivity = cfg.limiter && kind != IntegratorKind::ssprk2_explicit &&
                               kind != IntegratorKind::ars222;
      const SimulationState s = simulate(p, ctx, kind, p.timestep(cfg.cfl), cfg.t_final, true);
      const MacroProfiles m = macro_profiles(s.f, p.grid(), p.vgrid());
      Table prof{"run_profile", {"x", "rho", "u", "T"}, {}};
      for (std::size_t j = 0; j < m.x.size(); ++j)
        prof.rows.push_back({m.x[j], m.rho[j], m.u[j], m.T[j]});
      Table hist{"run_history", {"step", "time", "dt", "negative_cells", "entropy"}, {}};
      for (const auto& r : s.history)
        hist.rows.push_back({static_cast<long long>(r.step), r.time, r.dt,
                             static_cast<long long>(r.negative_cells), r.entropy});
      report.tables = {prof, hist};
      report.metadata.emplace_back("steps", std::to_string(s.steps));
      report.metadata.emplace_back("drift_mass", format_double(s.drift[0]));
      report.metadata.emplace_back("drift_momentum", format_double(s.drift[1]));
      report.metadata.emplace_back("drift_energy", format_double(s.drift[2]));
      break;
    }
    case Subcommand::accuracy: {
      AccuracyOptions opts;
      opts.integrator = cfg.integrators.front();
      opts.transport = cfg.transport;
      opts.nv = nv;
      opts.vmax = cfg.vmax;
      opts.cfl = cfg.cfl;
      opts.t_final = cfg.t_final;
      opts.limiter = cfg.limiter;
      report.tables = {accuracy_table(cfg.model,
                                      experiment_accuracy(cfg.model, cfg.eps, cfg.nx, opts))};
      break;
    }
    case Subcommand::positivity: {
      PositivityOptions opts;
      opts.nx = cfg.nx.front();
      opts.nv = nv;
      opts.vmax = cfg.vmax;
      opts.cfl = cfg.cfl;
      opts.t_final = cfg.t_final;
      opts.limiter = cfg.limiter;
      opts.transport = cfg.transport;
      report.tables = {positivity_table(
          experiment_positivity(cfg.model, cfg.eps, cfg.integrators, opts))};
      break;
    }
    case Subcommand::mixed_regime: {
      MixedRegimeOptions opts;
      opts.nx = cfg.nx.front();
      opts.nx_ref = 2 * opts.nx;
      opts.nv = nv;
      opts.vmax = cfg.vmax;
      opts.eps0 = cfg.eps0;
      opts.cfl = cfg.cfl;
      opts.t_final = cfg.t_final;
      opts.limiter = cfg.limiter;
      const MixedRegimeResult r = experiment_mixed_regime(cfg.model, opts);
      Table summary{"mixed_regime_summary",
                    {"quantity", "discrepancy", "reference_discrepancy", "tolerance", "pass"},
                    {}};
      const char* names[3] = {"rho", "u", "T"};
      for (std::size_t q = 0; q < 3; ++q)
        summary.rows.push_back({std::string(names[q]), r.discrepancy[q],
                                r.reference_discrepancy[q], r.tolerance[q],
                                std::string(r.discrepancy[q] <= r.tolerance[q] ? "yes" : "no")});
      report.tables = {mixed_regime_table(r), summary};
      break;
    }
    case Subcommand::homogeneous: {
      HomogeneousOptions opts;
      opts.nv = nv;
      opts.vmax = cfg.vmax;
      opts.dim = cfg.model == CollisionModel::esbgk ? 2 : 1;
      opts.t_final = cfg.t_final;
      report.tables = {homogeneous_table(experiment_homogeneous(cfg.model, opts))};
      break;
    }
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report.metadata.emplace_back("wall_time_s", format_double(wall));
  return report;
}

}  // namespace kinex
