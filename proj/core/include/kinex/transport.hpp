#pragma once

// Finite-volume discretisations of -v df/dx (first-order upwind and WENO5 with
// a bound-preserving interface limiter), the in-cell degree-4 reconstruction
// and the Gauss-point evaluation of the collision step.

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include "kinex/collision.hpp"
#include "kinex/grid.hpp"

namespace kinex {

enum class TransportKind { upwind1, weno5 };

std::string_view to_string(TransportKind k);
TransportKind parse_transport_kind(std::string_view name);

/// Ghost cells: three on each side.  Periodic ghosts wrap; Dirichlet ghosts
/// hold fixed profiles.
class BoundaryGhosts {
 public:
  static constexpr int width = 3;

  static BoundaryGhosts periodic();
  /// left[k] is cell -width + k, right[k] is cell nx + k.
  static BoundaryGhosts dirichlet(std::vector<Profile> left, std::vector<Profile> right);
  /// Dirichlet ghosts that repeat the first and last cell of `initial`.
  static BoundaryGhosts from_field_edges(const DistributionField& initial);

  BoundaryKind kind() const { return kind_; }

  /// Fills col[k] = f(k - width, i) for k = 0 .. nx + 2*width - 1.
  void extended_column(const DistributionField& f, std::size_t i,
                       std::span<double> col) const;

 private:
  BoundaryKind kind_ = BoundaryKind::periodic;
  std::vector<Profile> left_, right_;
};

/// Smoothness-indicator regulariser of the WENO weights.
inline constexpr double kWenoEpsilon = 1e-6;

/// Left-biased WENO5-JS value at the right interface of the centre cell of
/// (a, b, c, d, e).  The right-biased value at the left interface is
/// weno5_edge(e, d, c, b, a).
double weno5_edge(double a, double b, double c, double d, double e);

class TransportOperator {
 public:
  TransportOperator(TransportKind kind, bool limiter, SpatialGrid grid,
                    VelocityGrid vgrid, BoundaryGhosts ghosts = BoundaryGhosts::periodic());

  TransportKind kind() const { return kind_; }
  bool limiter() const { return limiter_; }
  const SpatialGrid& grid() const { return grid_; }
  const VelocityGrid& vgrid() const { return vgrid_; }
  const BoundaryGhosts& ghosts() const { return ghosts_; }

  /// c such that forward Euler is positivity preserving for dt <= c dx / vmax:
  /// 1 for upwind1, 1/12 for limited WENO5.  Unlimited WENO5 reports 1/12 as
  /// its nominal bound although nothing is guaranteed.
  double dt_fe_factor() const;
  double dt_fe() const;

  /// out = T(f) = -(F_{j+1/2} - F_{j-1/2}) / dx.
  void rate(const DistributionField& f, DistributionField& out) const;

  /// Number of (cell, velocity) pairs where the interface limiter engaged in
  /// the most recent rate() call.
  std::size_t last_limited() const { return last_limited_; }

 private:
  TransportKind kind_;
  bool limiter_;
  SpatialGrid grid_;
  VelocityGrid vgrid_;
  BoundaryGhosts ghosts_;
  mutable std::size_t last_limited_ = 0;
};

/// Periodic upwind rate.
DistributionField upwind_apply(const DistributionField& f, const SpatialGrid& grid,
                               const VelocityGrid& vgrid);
/// Periodic WENO5 rate, optionally limited.
DistributionField weno5_apply(const DistributionField& f, const SpatialGrid& grid,
                              const VelocityGrid& vgrid, bool limiter = false);

/// Evaluation points of the in-cell reconstruction, in units of dx from the
/// cell centre: the three Gauss-Legendre points followed by both interfaces.
inline constexpr int kCheckPoints = 5;
const std::array<double, kCheckPoints>& check_point_offsets();

/// Weights W with p(xi_k) = sum_m W[k][m] fbar_{j-2+m}, p the degree-4
/// polynomial matching five consecutive cell averages.
const std::array<std::array<double, 5>, kCheckPoints>& reconstruction_weights();

/// Values of one velocity slice of the reconstruction in one cell.
struct CellPointValues {
  double average = 0.0;
  std::array<double, kCheckPoints> values{};
};

/// Unlimited point values from the five averages centred on the cell.
CellPointValues reconstruct(std::span<const double, 5> averages);

/// Scales the reconstruction toward its average so that every check point is
/// nonnegative; returns the factor theta = min(1, a / (a - m)).
/// Throws InvalidStateError for a negative average.
double positivity_limit(CellPointValues& cell);

enum class ReconstructionKind {
  /// f_{j,l} = f_j: the collision step acts on cell averages.
  piecewise_constant,
  /// Limited degree-4 reconstruction at the Gauss-Legendre points.
  degree4,
};

/// Gauss-Legendre point values f_{j,l} of every cell, stored as three fields.
struct CellReconstruction {
  std::array<DistributionField, 3> points;
  /// Number of (cell, velocity) slices where the limiter engaged.
  std::size_t limited = 0;
};

CellReconstruction build_reconstruction(const DistributionField& f,
                                        const BoundaryGhosts& ghosts);

/// out_j = sum_l w_l exp(s_base / eps(x_{j,l}) Q) f_{j,l}.  With
/// piecewise-constant reconstruction and constant eps the solver is applied
/// once per cell; otherwise once per Gauss point.  out may alias f.
void gauss_point_collision(const DistributionField& f, const EpsilonField& eps,
                           double s_base, const HomogeneousSolver& solver,
                           ReconstructionKind recon, const BoundaryGhosts& ghosts,
                           DistributionField& out);

}  // namespace kinex
