#include "kinex/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kinex/errors.hpp"

namespace kinex {

const std::array<double, 3> CellQuadrature::offsets = {
    -0.5 * std::sqrt(0.6), 0.0, 0.5 * std::sqrt(0.6)};
const std::array<double, 3> CellQuadrature::weights = {5.0 / 18.0, 8.0 / 18.0,
                                                       5.0 / 18.0};

std::size_t VelocityGrid::size() const {
  std::size_t n = 1;
  for (int d = 0; d < dim; ++d) n *= static_cast<std::size_t>(nv);
  return n;
}

double VelocityGrid::weight() const { return std::pow(dv, dim); }

int VelocityGrid::axis_index(std::size_t k, int axis) const {
  for (int d = 0; d < axis; ++d) k /= static_cast<std::size_t>(nv);
  return static_cast<int>(k % static_cast<std::size_t>(nv));
}

VelocityGrid build_velocity_grid(double vmax, int nv, int dim) {
  if (!(vmax > 0.0) || !std::isfinite(vmax))
    throw ConfigError("velocity cutoff must be positive, got " +
                      std::to_string(vmax));
  if (nv < 2)
    throw ConfigError("velocity grid needs at least 2 points, got " +
                      std::to_string(nv));
  if (dim < 1 || dim > 3)
    throw ConfigError("velocity dimension must be 1, 2 or 3");

  VelocityGrid g;
  g.vmax = vmax;
  g.nv = nv;
  g.dim = dim;
  g.dv = 2.0 * vmax / nv;
  g.points.resize(static_cast<std::size_t>(nv));
  // Fill symmetrically so that the points sum to exactly zero.
  for (int i = 0; i < nv / 2; ++i) {
    const double v = -vmax + (i + 0.5) * g.dv;
    g.points[static_cast<std::size_t>(i)] = v;
    g.points[static_cast<std::size_t>(nv - 1 - i)] = -v;
  }
  if (nv % 2 == 1) g.points[static_cast<std::size_t>(nv / 2)] = 0.0;
  return g;
}

SpatialGrid build_spatial_grid(double xlo, double xhi, int nx, BoundaryKind bc) {
  if (nx < 5)
    throw ConfigError("spatial grid needs at least 5 cells, got " +
                      std::to_string(nx));
  if (!(xhi > xlo)) throw ConfigError("spatial domain must have xhi > xlo");
  SpatialGrid g;
  g.xlo = xlo;
  g.xhi = xhi;
  g.nx = nx;
  g.dx = (xhi - xlo) / nx;
  g.bc = bc;
  return g;
}

double eval_epsilon(double x, double eps0) {
  return eps0 + (std::tanh(1.0 - 11.0 * (x - 1.0)) +
                 std::tanh(1.0 + 11.0 * (x - 1.0)));
}

EpsilonField EpsilonField::constant(const SpatialGrid& grid, double value) {
  if (!(value > 0.0)) throw ConfigError("Knudsen number must be positive");
  EpsilonField e;
  e.kind_ = Kind::constant;
  e.eps0_ = value;
  e.values_.assign(static_cast<std::size_t>(3 * grid.nx), value);
  e.centers_.assign(static_cast<std::size_t>(grid.nx), value);
  return e;
}

EpsilonField EpsilonField::mixed_regime(const SpatialGrid& grid, double eps0) {
  if (!(eps0 > 0.0)) throw ConfigError("eps0 must be positive");
  EpsilonField e;
  e.kind_ = Kind::mixed_regime;
  e.eps0_ = eps0;
  e.values_.resize(static_cast<std::size_t>(3 * grid.nx));
  e.centers_.resize(static_cast<std::size_t>(grid.nx));
  for (int j = 0; j < grid.nx; ++j) {
    e.centers_[static_cast<std::size_t>(j)] = eval_epsilon(grid.center(j), eps0);
    for (int l = 0; l < 3; ++l) {
      const double v = eval_epsilon(grid.gauss_point(j, l), eps0);
      if (!(v > 0.0))
        throw DomainError("Knudsen field is not positive at a Gauss point");
      e.values_[static_cast<std::size_t>(3 * j + l)] = v;
    }
  }
  return e;
}

double cfl_timestep(const SpatialGrid& grid, const VelocityGrid& vgrid,
                    double cfl) {
  return cfl * grid.dx / vgrid.vmax;
}

std::size_t DistributionField::count_negative() const {
  return static_cast<std::size_t>(
      std::count_if(data_.begin(), data_.end(), [](double x) { return x < 0.0; }));
}

double DistributionField::min_value() const {
  return data_.empty() ? 0.0 : *std::min_element(data_.begin(), data_.end());
}

bool DistributionField::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double x) { return std::isfinite(x); });
}

void linear_combination(double a, const DistributionField& x, double b,
                        const DistributionField& y, DistributionField& out) {
  if (!x.same_shape(y)) throw ConfigError("field shape mismatch");
  if (!out.same_shape(x)) out = DistributionField(x.nx(), x.nv());
  auto xv = x.values();
  auto yv = y.values();
  auto ov = out.values();
  for (std::size_t k = 0; k < ov.size(); ++k) ov[k] = a * xv[k] + b * yv[k];
}

}  // namespace kinex
