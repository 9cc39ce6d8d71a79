#pragma once

// The exponential Runge-Kutta scheme, its coefficient sets and the baseline
// integrators (explicit SSP-RK2 and ARS(2,2,2) IMEX).

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "kinex/collision.hpp"
#include "kinex/errors.hpp"
#include "kinex/moments.hpp"
#include "kinex/transport.hpp"

namespace kinex {

struct SchemeCoefficients {
  double a0 = 1.0 / 3.0;
  double a1 = 1.0 / 3.0;
  double a2 = 1.0 / 3.0;
  double b1 = 1.0;
  double b2 = 1.0;
  double w = 0.5;

  /// (1/3, 1/3, 1/3, 1, 1, 1/2).
  static SchemeCoefficients standard();
  /// (1/2, 0, 1/2, 1, 1, 1/2).
  static SchemeCoefficients strang();
  /// (0, 1, 0, 1, 1, 1/2).
  static SchemeCoefficients transport_exp();
  /// b1, b2 = 1 / (1 -+ sqrt(1 - 2w)) with the given a's; w in (0, 1/2].
  static SchemeCoefficients from_w(double w, double a0, double a1, double a2);

  /// a0,a1,b1,b2 >= 0 and 0 <= a2,w <= 1.
  bool positivity_ok() const;
  /// a0, a1 > 0 and 0 < a2 < 1.
  bool ap_ok() const;
  bool second_order(double tol = 1e-14) const;
};

/// Residuals of a0+a1+a2-1, w(b1+b2)-1, w b1 b2-1/2, w(b2 a1+(b1+b2)a0)-1/2.
std::array<double, 4> verify_order_conditions(const SchemeCoefficients& c);

/// Roots b1 <= b2 of the order conditions for a given w in (0, 1/2].
std::pair<double, double> b_from_w(double w);

enum class IntegratorKind { exprk2, ssprk2_explicit, strang, transport_exp, ars222 };

std::string_view to_string(IntegratorKind k);
IntegratorKind parse_integrator_kind(std::string_view name);
/// Coefficients of the exponential variants; ConfigError for the others.
SchemeCoefficients coefficients_for(IntegratorKind k);

/// Everything a step needs besides the state.
struct StepContext {
  SpatialGrid grid;
  VelocityGrid vgrid;
  /// Null means T = 0.
  const TransportOperator* transport = nullptr;
  const HomogeneousSolver* solver = nullptr;
  const EpsilonField* eps = nullptr;
  BoundaryGhosts ghosts = BoundaryGhosts::periodic();
  ReconstructionKind recon = ReconstructionKind::degree4;
  SchemeCoefficients coeffs = SchemeCoefficients::standard();
  /// Reject dt above dt_FE / max(b1, b2).
  bool enforce_cfl = true;
  /// Throw PositivityViolation when a stage drops below -positivity_tol.
  bool enforce_positivity = true;
  double positivity_tol = 1e-13;
  /// Merge the trailing E(a2 dt) into the next step's E(a0 dt).
  bool fusion = false;
};

/// Global conserved integrals at the scheme's moment-determining stages.
struct StageMoments {
  ConservedMoments initial;   // U^n
  ConservedMoments stage0;    // U^(0)
  ConservedMoments stage2;    // U^(2)
  ConservedMoments final;     // U^{n+1}
};

struct StepRecord {
  std::size_t step = 0;
  double time = 0.0;
  double dt = 0.0;
  /// Entries of f^{n+1} strictly below zero.
  std::size_t negative_cells = 0;
  /// NaN when f^{n+1} has negative entries.
  double entropy = 0.0;
};

struct SimulationState {
  DistributionField f;
  double t = 0.0;
  std::size_t steps = 0;
  /// Collision time not yet applied to f (fusion only).
  double pending_collision = 0.0;
  double initial_entropy = 0.0;
  ConservedMoments initial_moments;
  std::vector<StepRecord> history;
  /// Relative drift of the global (rho, rho u, E) against the initial state.
  std::array<double, 3> drift{};
};

/// Raised by run_simulation; carries the last completed state.
class SimulationAborted : public NumericalError {
 public:
  SimulationAborted(const std::string& what, std::shared_ptr<const SimulationState> snapshot)
      : NumericalError(what), snapshot_(std::move(snapshot)) {}
  const SimulationState& snapshot() const { return *snapshot_; }

 private:
  std::shared_ptr<const SimulationState> snapshot_;
};

/// One step of the exponential scheme; returns f^{n+1}.  Stage moments are
/// written to `moments` when given.
DistributionField exprk2_step(const DistributionField& fn, double dt,
                              const StepContext& ctx,
                              StageMoments* moments = nullptr,
                              double pending_collision = 0.0);

/// Heun's method on T(f) + Q(f)/eps with Q averaged over the Gauss points.
/// Throws NumericalError once any |f| exceeds kBlowUpThreshold.
DistributionField ssprk2_explicit_step(const DistributionField& fn, double dt,
                                       const StepContext& ctx);

inline constexpr double kBlowUpThreshold = 1e10;

/// ARS(2,2,2): explicit T, implicit Q/eps through solver.resolve() on cell
/// averages with the cell-centre eps.
DistributionField ars222_step(const DistributionField& fn, double dt,
                              const StepContext& ctx);

/// sum_l w_l Q(f_{j,l}) / eps(x_{j,l}).
void collision_rate(const DistributionField& f, const StepContext& ctx,
                    DistributionField& out);

struct RunOptions {
  IntegratorKind kind = IntegratorKind::exprk2;
  double dt = 0.0;
  double t_final = 0.0;
  bool record_entropy = true;
  /// ConfigError if t_final / dt needs more steps than this.
  std::size_t max_steps = 100000000;
};

/// Steps from `initial` to t_final with a shortened last step.
SimulationState run_simulation(const DistributionField& initial, const StepContext& ctx,
                               const RunOptions& opts);

}  // namespace kinex
