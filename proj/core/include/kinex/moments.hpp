#pragma once

// Velocity moments, Maxwellian / anisotropic Gaussian equilibria and the
// discrete entropy.

#include <Eigen/Dense>
#include <array>
#include <span>
#include <vector>

#include "kinex/grid.hpp"

namespace kinex {

using Profile = std::vector<double>;

/// Densities below this are treated as vacuum.
inline constexpr double kDensityFloor = 1e-300;

struct MomentVector {
  int dim = 1;
  double rho = 0.0;
  Eigen::Vector3d momentum = Eigen::Vector3d::Zero();  // rho*u
  double energy = 0.0;                                // 1/2 rho|u|^2 + d/2 rho T
  Eigen::Vector3d u = Eigen::Vector3d::Zero();
  double T = 0.0;
  /// (1/rho) \int f (v-u)(v-u)^T dv; only the leading dim x dim block is used.
  Eigen::Matrix3d theta = Eigen::Matrix3d::Zero();

  /// Builds a consistent vector from primitive variables (Theta = T I).
  static MomentVector from_primitive(double rho, double u, double T);
  static MomentVector from_primitive(int dim, double rho,
                                     const Eigen::Vector3d& u, double T);
};

/// (1, v, |v|^2/2) integrated against g; only the first dim momentum
/// components are meaningful.
struct ConservedMoments {
  double mass = 0.0;
  Eigen::Vector3d momentum = Eigen::Vector3d::Zero();
  double energy = 0.0;
};

ConservedMoments conserved_moments(std::span<const double> g,
                                   const VelocityGrid& vgrid);

/// Midpoint-quadrature moments of g, Theta computed about u.
/// Throws DegenerateDensityError when rho <= kDensityFloor.
MomentVector compute_moments(std::span<const double> g, const VelocityGrid& vgrid);

/// rho / (2 pi T)^{d/2} exp(-|v-u|^2 / (2T)) at every node.
/// Throws DomainError for T <= 0 or rho < 0.
Profile maxwellian(const MomentVector& mv, const VelocityGrid& vgrid);
void maxwellian(const MomentVector& mv, const VelocityGrid& vgrid,
                std::span<double> out);

/// rho / sqrt(det(2 pi C)) exp(-1/2 (v-u)^T C^{-1} (v-u)).
/// Throws DomainError if C is not positive definite.
void gaussian(double rho, const Eigen::Vector3d& u, const Eigen::Matrix3d& cov,
              const VelocityGrid& vgrid, std::span<double> out);

/// (1-nu) T I + nu Theta.
Eigen::Matrix3d blended_temperature(const MomentVector& mv, double nu);

/// Gaussian with covariance (1-nu) T I + nu Theta.  nu must lie in [-1/2, 1).
/// For nu == 0 this is exactly maxwellian(mv).
Profile gaussian_target(const MomentVector& mv, double nu,
                        const VelocityGrid& vgrid);

/// \int g log g dv with 0 log 0 = 0.  Throws InvalidStateError on negatives.
double profile_entropy(std::span<const double> g, const VelocityGrid& vgrid);

/// dx * sum_j S[f_j].
double discrete_entropy(const DistributionField& f, const SpatialGrid& grid,
                        const VelocityGrid& vgrid);

/// Per-moment relative change |after - before| / max(|before|, floor), where
/// the floor is |before mass| so that vanishing momenta are measured on the
/// density scale.  Returns (mass, momentum (first axis), energy).
std::array<double, 3> moment_drift(std::span<const double> before,
                                   std::span<const double> after,
                                   const VelocityGrid& vgrid);

/// Global dx*sum_j <f_j phi> integrals.
ConservedMoments field_moments(const DistributionField& f, const SpatialGrid& grid,
                               const VelocityGrid& vgrid);

/// Relative drift of the global conserved integrals between two fields.
std::array<double, 3> conservation_drift(const DistributionField& before,
                                         const DistributionField& after,
                                         const SpatialGrid& grid,
                                         const VelocityGrid& vgrid);

std::array<double, 3> relative_drift(const ConservedMoments& before,
                                     const ConservedMoments& after);

}  // namespace kinex
