#pragma once

// Solution operators g -> exp(sQ) g of the space-homogeneous collision
// equation for the BGK, ES-BGK, Fokker-Planck and Boltzmann (exponential
// midpoint) models.

#include <Eigen/Dense>
#include <memory>
#include <span>
#include <string_view>

#include "kinex/grid.hpp"
#include "kinex/moments.hpp"

namespace kinex {

enum class CollisionModel { bgk, esbgk, fp, boltz_mock };

std::string_view to_string(CollisionModel m);
/// Throws ConfigError for unknown names.
CollisionModel parse_collision_model(std::string_view name);

/// Contract: for s >= 0 and g >= 0, apply() returns a nonnegative profile
/// with the moments of g and tends to the Maxwellian of g as s grows.
class HomogeneousSolver {
 public:
  virtual ~HomogeneousSolver() = default;

  virtual CollisionModel model() const = 0;
  virtual const VelocityGrid& vgrid() const = 0;

  /// out = exp(sQ) g (exact or second-order approximation).  out may alias g.
  virtual void apply(std::span<const double> g, double s,
                     std::span<double> out) const = 0;
  /// out = Q(g).
  virtual void rate(std::span<const double> g, std::span<double> out) const = 0;
  /// Solves x - c Q(x) = rhs for the implicit stage of an IMEX method.
  /// The default throws ConfigError.
  virtual void resolve(std::span<const double> rhs, double c,
                       std::span<double> out) const;

  Profile apply(std::span<const double> g, double s) const;
};

struct LobattoWeights {
  double lambda = 0.0;
  double wg = 1.0;
  double w1 = 0.0;
  double w2 = 0.0;
};

/// Below this lambda the weights come from their Taylor series.
inline constexpr double kLobattoSeriesThreshold = 1e-6;

/// Exponentially weighted two-point Gauss-Lobatto weights for lambda >= 0.
LobattoWeights lobatto_weights(double lambda);

/// e^{-eta s} g + (1 - e^{-eta s}) M[g].
Profile bgk_exp(std::span<const double> g, double s, double eta,
                const VelocityGrid& vgrid);

/// nu e^{-eta(1-nu)s} Theta + (1 - nu e^{-eta(1-nu)s}) T I.
Eigen::Matrix3d esbgk_tbar_at(double s, double eta, double nu,
                              const MomentVector& mv);

/// e^{-eta s} g + w1 G[Tbar(0)] + w2 G[Tbar(s)].
Profile esbgk_exp(std::span<const double> g, double s, double eta, double nu,
                  const VelocityGrid& vgrid);

/// Gain part P(g) = Q(g) + mu g of a collision operator, with P(g) >= 0.
class GainEvaluator {
 public:
  virtual ~GainEvaluator() = default;
  virtual double mu() const = 0;
  virtual void gain(std::span<const double> g, const VelocityGrid& vgrid,
                    std::span<double> out) const = 0;
};

/// P(g) = mu M[g]; the operator it encodes is BGK with rate mu.
class BgkShapedGain final : public GainEvaluator {
 public:
  explicit BgkShapedGain(double mu);
  double mu() const override { return mu_; }
  void gain(std::span<const double> g, const VelocityGrid& vgrid,
            std::span<double> out) const override;

 private:
  double mu_;
};

/// P(g) = eta G_nu[g] + (mu - eta) g with mu >= eta; encodes ES-BGK.
class EsbgkShapedGain final : public GainEvaluator {
 public:
  EsbgkShapedGain(double mu, double eta, double nu);
  double mu() const override { return mu_; }
  void gain(std::span<const double> g, const VelocityGrid& vgrid,
            std::span<double> out) const override;

 private:
  double mu_, eta_, nu_;
};

/// Two-stage exponential midpoint step with lambda = mu s.
/// Throws ContractViolation if the gain returns negative values.
Profile boltzmann_expmidpoint(std::span<const double> g, double s,
                              const GainEvaluator& gain, const VelocityGrid& vgrid);

enum class FpMethod {
  /// Flux-form operator on f, Taylor series or contour rational exponential.
  rational_flux,
  /// Symmetrised operator on f / sqrt(M) through its eigen-decomposition.
  eigen_symmetric,
};

struct FpOptions {
  FpMethod method = FpMethod::rational_flux;
  /// Return the discrete equilibrium directly once s*T is large enough that
  /// every non-equilibrium mode has decayed below e^{-40}.
  bool fast_path = true;
};

/// s*T above which the fast path is taken.
inline constexpr double kFpEquilibriumTime = 80.0;

/// exp(sQ) g for the discretised Fokker-Planck operator built from M[g],
/// with roundoff negatives clamped to zero.
Profile fp_exp(std::span<const double> g, double s, const VelocityGrid& vgrid,
               const FpOptions& opts = {});

class BgkSolver final : public HomogeneousSolver {
 public:
  BgkSolver(VelocityGrid vgrid, double eta = 1.0);
  CollisionModel model() const override { return CollisionModel::bgk; }
  const VelocityGrid& vgrid() const override { return vgrid_; }
  void apply(std::span<const double> g, double s,
             std::span<double> out) const override;
  void rate(std::span<const double> g, std::span<double> out) const override;
  void resolve(std::span<const double> rhs, double c,
               std::span<double> out) const override;
  using HomogeneousSolver::apply;

 private:
  VelocityGrid vgrid_;
  double eta_;
};

class EsBgkSolver final : public HomogeneousSolver {
 public:
  EsBgkSolver(VelocityGrid vgrid, double eta = 1.0, double nu = -0.5);
  CollisionModel model() const override { return CollisionModel::esbgk; }
  const VelocityGrid& vgrid() const override { return vgrid_; }
  void apply(std::span<const double> g, double s,
             std::span<double> out) const override;
  void rate(std::span<const double> g, std::span<double> out) const override;
  using HomogeneousSolver::apply;

  double nu() const { return nu_; }
  double eta() const { return eta_; }

 private:
  VelocityGrid vgrid_;
  double eta_, nu_;
};

class FokkerPlanckSolver final : public HomogeneousSolver {
 public:
  explicit FokkerPlanckSolver(VelocityGrid vgrid, FpOptions opts = {});
  CollisionModel model() const override { return CollisionModel::fp; }
  const VelocityGrid& vgrid() const override { return vgrid_; }
  void apply(std::span<const double> g, double s,
             std::span<double> out) const override;
  void rate(std::span<const double> g, std::span<double> out) const override;
  /// Forms (I - cQ)^{-1} densely, zeroes its negative entries and applies it.
  void resolve(std::span<const double> rhs, double c,
               std::span<double> out) const override;
  using HomogeneousSolver::apply;

 private:
  VelocityGrid vgrid_;
  FpOptions opts_;
};

class BoltzmannMidpointSolver final : public HomogeneousSolver {
 public:
  BoltzmannMidpointSolver(VelocityGrid vgrid, std::shared_ptr<const GainEvaluator> gain);
  CollisionModel model() const override { return CollisionModel::boltz_mock; }
  const VelocityGrid& vgrid() const override { return vgrid_; }
  void apply(std::span<const double> g, double s,
             std::span<double> out) const override;
  void rate(std::span<const double> g, std::span<double> out) const override;
  using HomogeneousSolver::apply;

 private:
  VelocityGrid vgrid_;
  std::shared_ptr<const GainEvaluator> gain_;
};

/// Solver for a model with default parameters (eta = 1, nu = -1/2,
/// Boltzmann mock = BGK-shaped gain with mu = 1).
std::unique_ptr<HomogeneousSolver> make_solver(CollisionModel model,
                                               const VelocityGrid& vgrid);

}  // namespace kinex
