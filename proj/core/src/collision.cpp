#include "kinex/collision.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "kinex/errors.hpp"
#include "kinex/expm_tridiag.hpp"

namespace kinex {

namespace {

void check_step(std::span<const double> g, double s, std::span<double> out,
                const VelocityGrid& vgrid) {
  if (g.size() != vgrid.size() || out.size() != vgrid.size())
    throw ConfigError("profile length does not match velocity grid size");
  if (!(s >= 0.0) || !std::isfinite(s))
    throw DomainError("collision step needs a finite s >= 0, got " + std::to_string(s));
}

void copy_if_needed(std::span<const double> g, std::span<double> out) {
  if (out.data() != g.data()) std::copy(g.begin(), g.end(), out.begin());
}

// sqrt(M_i) evaluated directly so that it stays representable where M_i
// itself would underflow.
Profile sqrt_maxwellian(const MomentVector& mv, const VelocityGrid& vgrid) {
  const double norm = std::sqrt(mv.rho / std::sqrt(2.0 * std::numbers::pi * mv.T));
  const double inv4T = 1.0 / (4.0 * mv.T);
  Profile out(vgrid.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double c = vgrid.points[i] - mv.u[0];
    out[i] = norm * std::exp(-c * c * inv4T);
  }
  return out;
}

bool fp_fast_path_applies(const MomentVector& mv, double s, const VelocityGrid& vgrid) {
  const double T = mv.T;
  return s * T >= kFpEquilibriumTime && vgrid.dv * vgrid.dv <= T &&
         vgrid.vmax - std::abs(mv.u[0]) >= 4.0 * std::sqrt(T);
}

void fp_step(std::span<const double> g, double s, const VelocityGrid& vgrid,
             const FpOptions& opts, std::span<double> out) {
  if (vgrid.dim != 1) throw ConfigError("Fokker-Planck solver supports dim = 1 only");
  if (s == 0.0) {
    copy_if_needed(g, out);
    return;
  }
  const MomentVector mv = compute_moments(g, vgrid);
  if (opts.fast_path && fp_fast_path_applies(mv, s, vgrid)) {
    const Profile m = maxwellian(mv, vgrid);
    double gm = 0.0, mm = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      gm += g[i];
      mm += m[i];
    }
    const double scale = gm / mm;
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = scale * m[i];
    return;
  }
  if (opts.method == FpMethod::rational_flux) {
    const Tridiag q = fp_flux_operator(mv.u[0], mv.T, vgrid);
    const Profile y = expm_action(q, s, g);
    std::copy(y.begin(), y.end(), out.begin());
  } else {
    const Profile sq = sqrt_maxwellian(mv, vgrid);
    const SymTridiag a = build_fp_matrix(mv.u[0], mv.T, vgrid);
    Profile tilde(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) tilde[i] = g[i] / sq[i];
    const Profile y = expm_apply(a, s, tilde);
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = sq[i] * y[i];
  }
  clamp_nonneg(out);
  // The zero-flux operator conserves mass exactly; remove the residual
  // roundoff of the exponential and any clamped mass.
  double before = 0.0, after = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    before += g[i];
    after += out[i];
  }
  if (after > 0.0) {
    const double scale = before / after;
    for (double& x : out) x *= scale;
  }
}

}  // namespace

std::string_view to_string(CollisionModel m) {
  switch (m) {
    case CollisionModel::bgk: return "bgk";
    case CollisionModel::esbgk: return "esbgk";
    case CollisionModel::fp: return "fp";
    case CollisionModel::boltz_mock: return "boltz-mock";
  }
  return "unknown";
}

CollisionModel parse_collision_model(std::string_view name) {
  if (name == "bgk") return CollisionModel::bgk;
  if (name == "esbgk") return CollisionModel::esbgk;
  if (name == "fp") return CollisionModel::fp;
  if (name == "boltz-mock") return CollisionModel::boltz_mock;
  throw ConfigError("unknown collision model '" + std::string(name) +
                    "' (expected bgk, esbgk, fp or boltz-mock)");
}

void HomogeneousSolver::resolve(std::span<const double>, double,
                                std::span<double>) const {
  throw ConfigError(std::string("model ") + std::string(to_string(model())) +
                    " has no implicit stage solver");
}

Profile HomogeneousSolver::apply(std::span<const double> g, double s) const {
  Profile out(g.size());
  apply(g, s, out);
  return out;
}

LobattoWeights lobatto_weights(double lambda) {
  if (!(lambda >= 0.0)) throw DomainError("Lobatto weights need lambda >= 0");
  LobattoWeights w;
  w.lambda = lambda;
  w.wg = std::exp(-lambda);
  if (lambda < kLobattoSeriesThreshold) {
    const double l2 = lambda * lambda;
    w.w1 = 0.5 * lambda - l2 / 3.0 + l2 * lambda / 8.0;
    w.w2 = 0.5 * lambda - l2 / 6.0 + l2 * lambda / 24.0;
    return w;
  }
  const double ratio = -std::expm1(-lambda) / lambda;
  w.w1 = ratio - w.wg;
  w.w2 = 1.0 - ratio;
  return w;
}

Profile bgk_exp(std::span<const double> g, double s, double eta,
                const VelocityGrid& vgrid) {
  return BgkSolver(vgrid, eta).apply(g, s);
}

Eigen::Matrix3d esbgk_tbar_at(double s, double eta, double nu,
                              const MomentVector& mv) {
  const int d = mv.dim;
  const double decay = nu * std::exp(-eta * (1.0 - nu) * s);
  Eigen::Matrix3d tbar = Eigen::Matrix3d::Zero();
  tbar.topLeftCorner(d, d) = decay * mv.theta.topLeftCorner(d, d) +
                             (1.0 - decay) * mv.T * Eigen::MatrixXd::Identity(d, d);
  return tbar;
}

Profile esbgk_exp(std::span<const double> g, double s, double eta, double nu,
                  const VelocityGrid& vgrid) {
  return EsBgkSolver(vgrid, eta, nu).apply(g, s);
}

BgkShapedGain::BgkShapedGain(double mu) : mu_(mu) {
  if (!(mu > 0.0)) throw ConfigError("gain constant mu must be positive");
}

void BgkShapedGain::gain(std::span<const double> g, const VelocityGrid& vgrid,
                         std::span<double> out) const {
  maxwellian(compute_moments(g, vgrid), vgrid, out);
  for (double& x : out) x *= mu_;
}

EsbgkShapedGain::EsbgkShapedGain(double mu, double eta, double nu)
    : mu_(mu), eta_(eta), nu_(nu) {
  if (!(eta > 0.0) || !(mu >= eta))
    throw ConfigError("ES-BGK shaped gain needs 0 < eta <= mu");
}

void EsbgkShapedGain::gain(std::span<const double> g, const VelocityGrid& vgrid,
                           std::span<double> out) const {
  const Profile target = gaussian_target(compute_moments(g, vgrid), nu_, vgrid);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = eta_ * target[i] + (mu_ - eta_) * g[i];
}

Profile boltzmann_expmidpoint(std::span<const double> g, double s,
                              const GainEvaluator& gain, const VelocityGrid& vgrid) {
  Profile out(g.size());
  check_step(g, s, out, vgrid);
  const double mu = gain.mu();
  if (!(mu > 0.0)) throw ContractViolation("gain evaluator reported mu <= 0");
  if (s == 0.0) return {g.begin(), g.end()};

  const Profile m = maxwellian(compute_moments(g, vgrid), vgrid);
  Profile p(g.size());
  auto eval_gain = [&](std::span<const double> x, const char* stage) {
    gain.gain(x, vgrid, p);
    for (std::size_t i = 0; i < p.size(); ++i)
      if (!(p[i] >= 0.0))
        throw ContractViolation(std::string("gain evaluator returned a negative value at ") +
                                stage + " stage, node " + std::to_string(i));
  };

  const double lambda = mu * s;
  const double eh = std::exp(-0.5 * lambda);
  const double e1 = eh * eh;

  eval_gain(g, "first");
  Profile f1(g.size());
  {
    const double cg = eh;
    const double cp = 0.5 * lambda * eh;
    const double cm = std::max(0.0, -std::expm1(-0.5 * lambda) - cp);
    for (std::size_t i = 0; i < g.size(); ++i)
      f1[i] = cg * g[i] + cm * m[i] + cp * p[i] / mu;
  }
  eval_gain(f1, "second");
  {
    const double cp = lambda * eh;
    const double cm = std::max(0.0, -std::expm1(-lambda) - cp);
    for (std::size_t i = 0; i < g.size(); ++i)
      out[i] = e1 * g[i] + cm * m[i] + cp * p[i] / mu;
  }
  return out;
}

Profile fp_exp(std::span<const double> g, double s, const VelocityGrid& vgrid,
               const FpOptions& opts) {
  Profile out(g.size());
  check_step(g, s, out, vgrid);
  fp_step(g, s, vgrid, opts, out);
  return out;
}

BgkSolver::BgkSolver(VelocityGrid vgrid, double eta) : vgrid_(std::move(vgrid)), eta_(eta) {
  if (!(eta > 0.0)) throw ConfigError("collision rate eta must be positive");
}

void BgkSolver::apply(std::span<const double> g, double s,
                      std::span<double> out) const {
  check_step(g, s, out, vgrid_);
  if (s == 0.0) {
    copy_if_needed(g, out);
    return;
  }
  const Profile m = maxwellian(compute_moments(g, vgrid_), vgrid_);
  const double decay = std::exp(-eta_ * s);
  const double relax = -std::expm1(-eta_ * s);
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = decay * g[i] + relax * m[i];
}

void BgkSolver::rate(std::span<const double> g, std::span<double> out) const {
  const Profile m = maxwellian(compute_moments(g, vgrid_), vgrid_);
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = eta_ * (m[i] - g[i]);
}

void BgkSolver::resolve(std::span<const double> rhs, double c,
                        std::span<double> out) const {
  // The solution shares the moments of rhs, so M is known in advance.
  const Profile m = maxwellian(compute_moments(rhs, vgrid_), vgrid_);
  const double k = c * eta_;
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = (rhs[i] + k * m[i]) / (1.0 + k);
}

EsBgkSolver::EsBgkSolver(VelocityGrid vgrid, double eta, double nu)
    : vgrid_(std::move(vgrid)), eta_(eta), nu_(nu) {
  if (!(eta > 0.0)) throw ConfigError("collision rate eta must be positive");
  if (!(nu >= -0.5 && nu < 1.0))
    throw ConfigError("ES-BGK parameter nu must lie in [-1/2, 1)");
}

void EsBgkSolver::apply(std::span<const double> g, double s,
                        std::span<double> out) const {
  check_step(g, s, out, vgrid_);
  if (s == 0.0) {
    copy_if_needed(g, out);
    return;
  }
  const MomentVector mv = compute_moments(g, vgrid_);
  const LobattoWeights w = lobatto_weights(eta_ * s);
  Profile g0(g.size()), g1(g.size());
  gaussian(mv.rho, mv.u, blended_temperature(mv, nu_), vgrid_, g0);
  gaussian(mv.rho, mv.u, esbgk_tbar_at(s, eta_, nu_, mv), vgrid_, g1);
  for (std::size_t i = 0; i < g.size(); ++i)
    out[i] = w.wg * g[i] + w.w1 * g0[i] + w.w2 * g1[i];
}

void EsBgkSolver::rate(std::span<const double> g, std::span<double> out) const {
  const Profile target = gaussian_target(compute_moments(g, vgrid_), nu_, vgrid_);
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = eta_ * (target[i] - g[i]);
}

FokkerPlanckSolver::FokkerPlanckSolver(VelocityGrid vgrid, FpOptions opts)
    : vgrid_(std::move(vgrid)), opts_(opts) {
  if (vgrid_.dim != 1) throw ConfigError("Fokker-Planck solver supports dim = 1 only");
}

void FokkerPlanckSolver::apply(std::span<const double> g, double s,
                               std::span<double> out) const {
  check_step(g, s, out, vgrid_);
  fp_step(g, s, vgrid_, opts_, out);
}

void FokkerPlanckSolver::rate(std::span<const double> g, std::span<double> out) const {
  const MomentVector mv = compute_moments(g, vgrid_);
  fp_flux_operator(mv.u[0], mv.T, vgrid_).apply(g, out);
}

void FokkerPlanckSolver::resolve(std::span<const double> rhs, double c,
                                 std::span<double> out) const {
  const MomentVector mv = compute_moments(rhs, vgrid_);
  const Tridiag q = fp_flux_operator(mv.u[0], mv.T, vgrid_);
  const std::size_t n = q.size();
  // I - cQ is a column diagonally dominant M-matrix, so elimination without
  // pivoting only adds nonnegative terms and keeps a nonnegative rhs
  // nonnegative in floating point.
  std::vector<double> diag(n), x(rhs.begin(), rhs.end());
  for (std::size_t i = 0; i < n; ++i) diag[i] = 1.0 - c * q.diag[i];
  for (std::size_t i = 1; i < n; ++i) {
    const double m = -c * q.lower[i - 1] / diag[i - 1];
    diag[i] -= m * (-c * q.upper[i - 1]);
    x[i] -= m * x[i - 1];
  }
  x[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = (x[i] + c * q.upper[i] * x[i + 1]) / diag[i];
  std::copy(x.begin(), x.end(), out.begin());
}

BoltzmannMidpointSolver::BoltzmannMidpointSolver(
    VelocityGrid vgrid, std::shared_ptr<const GainEvaluator> gain)
    : vgrid_(std::move(vgrid)), gain_(std::move(gain)) {
  if (!gain_) throw ConfigError("Boltzmann solver needs a gain evaluator");
}

void BoltzmannMidpointSolver::apply(std::span<const double> g, double s,
                                    std::span<double> out) const {
  const Profile y = boltzmann_expmidpoint(g, s, *gain_, vgrid_);
  std::copy(y.begin(), y.end(), out.begin());
}

void BoltzmannMidpointSolver::rate(std::span<const double> g,
                                   std::span<double> out) const {
  gain_->gain(g, vgrid_, out);
  const double mu = gain_->mu();
  for (std::size_t i = 0; i < g.size(); ++i) out[i] -= mu * g[i];
}

std::unique_ptr<HomogeneousSolver> make_solver(CollisionModel model,
                                               const VelocityGrid& vgrid) {
  switch (model) {
    case CollisionModel::bgk: return std::make_unique<BgkSolver>(vgrid);
    case CollisionModel::esbgk: return std::make_unique<EsBgkSolver>(vgrid);
    case CollisionModel::fp: return std::make_unique<FokkerPlanckSolver>(vgrid);
    case CollisionModel::boltz_mock:
      return std::make_unique<BoltzmannMidpointSolver>(
          vgrid, std::make_shared<BgkShapedGain>(1.0));
  }
  throw ConfigError("unknown collision model");
}

}  // namespace kinex
