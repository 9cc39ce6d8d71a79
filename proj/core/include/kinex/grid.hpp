#pragma once

// Position/velocity meshes, the Knudsen-number field and the cell-averaged
// phase-space density.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace kinex {

/// Uniform midpoint grid on [-vmax, vmax]^dim.  `points` holds the 1D axis;
/// for dim > 1 the grid is the tensor product with the first axis fastest.
struct VelocityGrid {
  double vmax = 15.0;
  int nv = 0;
  double dv = 0.0;
  int dim = 1;
  std::vector<double> points;

  /// Number of velocity nodes, nv^dim.
  std::size_t size() const;
  /// Midpoint quadrature weight dv^dim.
  double weight() const;
  /// Axis index of tensor node `k` along direction `axis`.
  int axis_index(std::size_t k, int axis) const;
  /// Component `axis` of velocity node `k`.
  double velocity(std::size_t k, int axis) const {
    return points[static_cast<std::size_t>(axis_index(k, axis))];
  }
};

/// Builds v_i = -vmax + (i - 1/2) dv, dv = 2 vmax / nv.
/// Throws ConfigError for vmax <= 0, nv < 2 or dim outside 1..3.
VelocityGrid build_velocity_grid(double vmax, int nv, int dim = 1);

enum class BoundaryKind { periodic, dirichlet };

/// Three-point Gauss-Legendre rule on a cell, as offsets from the centre in
/// units of dx and weights normalised to sum to one.
struct CellQuadrature {
  static constexpr int points = 3;
  static const std::array<double, 3> offsets;
  static const std::array<double, 3> weights;
};

struct SpatialGrid {
  double xlo = 0.0;
  double xhi = 2.0;
  int nx = 0;
  double dx = 0.0;
  BoundaryKind bc = BoundaryKind::periodic;

  double center(int j) const { return xlo + (j + 0.5) * dx; }
  double gauss_point(int j, int l) const {
    return center(j) + CellQuadrature::offsets[static_cast<std::size_t>(l)] * dx;
  }
};

/// Throws ConfigError unless nx >= 5 and xhi > xlo.
SpatialGrid build_spatial_grid(double xlo, double xhi, int nx,
                               BoundaryKind bc = BoundaryKind::periodic);

/// eps0 + tanh(1 - 11(x-1)) + tanh(1 + 11(x-1)).
double eval_epsilon(double x, double eps0);

/// Knudsen number sampled at the Gauss points of every cell.
class EpsilonField {
 public:
  enum class Kind { constant, mixed_regime };

  static EpsilonField constant(const SpatialGrid& grid, double value);
  static EpsilonField mixed_regime(const SpatialGrid& grid, double eps0);

  Kind kind() const { return kind_; }
  double eps0() const { return eps0_; }
  double at(int j, int l) const {
    return values_[static_cast<std::size_t>(3 * j + l)];
  }
  /// Value at the cell centre (used by cell-average evaluations).
  double center(int j) const {
    return centers_[static_cast<std::size_t>(j)];
  }
  bool is_constant() const { return kind_ == Kind::constant; }

 private:
  Kind kind_ = Kind::constant;
  double eps0_ = 1.0;
  std::vector<double> values_;
  std::vector<double> centers_;
};

/// dt = cfl * dx / vmax.
double cfl_timestep(const SpatialGrid& grid, const VelocityGrid& vgrid,
                    double cfl);

/// Cell averages f[j][i]: one contiguous velocity profile per cell.
class DistributionField {
 public:
  DistributionField() = default;
  DistributionField(int nx, std::size_t nv, double fill = 0.0)
      : nx_(nx), nv_(nv), data_(static_cast<std::size_t>(nx) * nv, fill) {}

  int nx() const { return nx_; }
  std::size_t nv() const { return nv_; }

  std::span<double> row(int j) {
    return {data_.data() + static_cast<std::size_t>(j) * nv_, nv_};
  }
  std::span<const double> row(int j) const {
    return {data_.data() + static_cast<std::size_t>(j) * nv_, nv_};
  }
  double& operator()(int j, std::size_t i) {
    return data_[static_cast<std::size_t>(j) * nv_ + i];
  }
  double operator()(int j, std::size_t i) const {
    return data_[static_cast<std::size_t>(j) * nv_ + i];
  }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  bool same_shape(const DistributionField& other) const {
    return nx_ == other.nx_ && nv_ == other.nv_;
  }

  /// Number of entries strictly below zero.
  std::size_t count_negative() const;
  double min_value() const;
  bool all_finite() const;

 private:
  int nx_ = 0;
  std::size_t nv_ = 0;
  std::vector<double> data_;
};

/// out = a*x + b*y, shapes must agree.
void linear_combination(double a, const DistributionField& x, double b,
                        const DistributionField& y, DistributionField& out);

}  // namespace kinex
