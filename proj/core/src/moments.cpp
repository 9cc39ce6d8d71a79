#include "kinex/moments.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "kinex/errors.hpp"

namespace kinex {

namespace {

Eigen::Vector3d node_velocity(const VelocityGrid& vgrid, std::size_t k) {
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
  for (int a = 0; a < vgrid.dim; ++a) v[a] = vgrid.velocity(k, a);
  return v;
}

void check_size(std::span<const double> g, const VelocityGrid& vgrid) {
  if (g.size() != vgrid.size())
    throw ConfigError("profile length " + std::to_string(g.size()) +
                      " does not match velocity grid size " +
                      std::to_string(vgrid.size()));
}

}  // namespace

MomentVector MomentVector::from_primitive(double rho, double u, double T) {
  return from_primitive(1, rho, Eigen::Vector3d(u, 0.0, 0.0), T);
}

MomentVector MomentVector::from_primitive(int dim, double rho,
                                          const Eigen::Vector3d& u, double T) {
  MomentVector mv;
  mv.dim = dim;
  mv.rho = rho;
  mv.u = Eigen::Vector3d::Zero();
  mv.u.head(dim) = u.head(dim);
  mv.momentum = rho * mv.u;
  mv.T = T;
  mv.energy = 0.5 * rho * mv.u.squaredNorm() + 0.5 * dim * rho * T;
  mv.theta = Eigen::Matrix3d::Zero();
  mv.theta.topLeftCorner(dim, dim) = T * Eigen::MatrixXd::Identity(dim, dim);
  return mv;
}

ConservedMoments conserved_moments(std::span<const double> g,
                                   const VelocityGrid& vgrid) {
  check_size(g, vgrid);
  ConservedMoments c;
  const double w = vgrid.weight();
  if (vgrid.dim == 1) {
    double m0 = 0.0, m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double v = vgrid.points[i];
      m0 += g[i];
      m1 += g[i] * v;
      m2 += g[i] * v * v;
    }
    c.mass = m0 * w;
    c.momentum[0] = m1 * w;
    c.energy = 0.5 * m2 * w;
    return c;
  }
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Eigen::Vector3d v = node_velocity(vgrid, k);
    c.mass += g[k];
    c.momentum += g[k] * v;
    c.energy += 0.5 * g[k] * v.squaredNorm();
  }
  c.mass *= w;
  c.momentum *= w;
  c.energy *= w;
  return c;
}

MomentVector compute_moments(std::span<const double> g, const VelocityGrid& vgrid) {
  check_size(g, vgrid);
  const int d = vgrid.dim;
  const double w = vgrid.weight();
  MomentVector mv;
  mv.dim = d;

  if (d == 1) {
    double m0 = 0.0, m1 = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      m0 += g[i];
      m1 += g[i] * vgrid.points[i];
    }
    mv.rho = m0 * w;
    if (!(mv.rho > kDensityFloor))
      throw DegenerateDensityError("density " + std::to_string(mv.rho) +
                                   " below quadrature floor");
    const double u = m1 * w / mv.rho;
    double c2 = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double c = vgrid.points[i] - u;
      c2 += g[i] * c * c;
    }
    mv.u[0] = u;
    mv.momentum[0] = m1 * w;
    mv.T = c2 * w / mv.rho;
    mv.theta(0, 0) = mv.T;
    mv.energy = 0.5 * mv.rho * u * u + 0.5 * mv.rho * mv.T;
    return mv;
  }

  double m0 = 0.0;
  Eigen::Vector3d m1 = Eigen::Vector3d::Zero();
  for (std::size_t k = 0; k < g.size(); ++k) {
    m0 += g[k];
    m1 += g[k] * node_velocity(vgrid, k);
  }
  mv.rho = m0 * w;
  if (!(mv.rho > kDensityFloor))
    throw DegenerateDensityError("density " + std::to_string(mv.rho) +
                                 " below quadrature floor");
  mv.momentum = m1 * w;
  mv.u = mv.momentum / mv.rho;
  Eigen::Matrix3d second = Eigen::Matrix3d::Zero();
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Eigen::Vector3d c = node_velocity(vgrid, k) - mv.u;
    second += g[k] * (c * c.transpose());
  }
  mv.theta = second * w / mv.rho;
  mv.T = mv.theta.trace() / d;
  mv.energy = 0.5 * mv.rho * mv.u.squaredNorm() + 0.5 * d * mv.rho * mv.T;
  return mv;
}

void maxwellian(const MomentVector& mv, const VelocityGrid& vgrid,
                std::span<double> out) {
  if (!(mv.T > 0.0))
    throw DomainError("Maxwellian needs T > 0, got T = " + std::to_string(mv.T));
  if (!(mv.rho >= 0.0)) throw DomainError("Maxwellian needs rho >= 0");
  if (out.size() != vgrid.size()) throw ConfigError("output size mismatch");
  const int d = vgrid.dim;
  const double norm = mv.rho / std::pow(2.0 * std::numbers::pi * mv.T, 0.5 * d);
  const double inv2T = 1.0 / (2.0 * mv.T);
  if (d == 1) {
    const double u = mv.u[0];
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double c = vgrid.points[i] - u;
      out[i] = norm * std::exp(-c * c * inv2T);
    }
    return;
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    const Eigen::Vector3d c = node_velocity(vgrid, k) - mv.u;
    out[k] = norm * std::exp(-c.head(d).squaredNorm() * inv2T);
  }
}

Profile maxwellian(const MomentVector& mv, const VelocityGrid& vgrid) {
  Profile out(vgrid.size());
  maxwellian(mv, vgrid, out);
  return out;
}

void gaussian(double rho, const Eigen::Vector3d& u, const Eigen::Matrix3d& cov,
              const VelocityGrid& vgrid, std::span<double> out) {
  const int d = vgrid.dim;
  if (out.size() != vgrid.size()) throw ConfigError("output size mismatch");
  const Eigen::MatrixXd c = cov.topLeftCorner(d, d);
  Eigen::LLT<Eigen::MatrixXd> llt(c);
  if (llt.info() != Eigen::Success || !(c.determinant() > 0.0))
    throw DomainError("Gaussian covariance is not positive definite");
  const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(d, d));
  const double det = (2.0 * std::numbers::pi * c).determinant();
  const double norm = rho / std::sqrt(det);
  for (std::size_t k = 0; k < out.size(); ++k) {
    Eigen::VectorXd w(d);
    for (int a = 0; a < d; ++a) w[a] = vgrid.velocity(k, a) - u[a];
    out[k] = norm * std::exp(-0.5 * w.dot(inv * w));
  }
}

Eigen::Matrix3d blended_temperature(const MomentVector& mv, double nu) {
  Eigen::Matrix3d tbar = Eigen::Matrix3d::Zero();
  const int d = mv.dim;
  tbar.topLeftCorner(d, d) =
      (1.0 - nu) * mv.T * Eigen::MatrixXd::Identity(d, d) +
      nu * mv.theta.topLeftCorner(d, d);
  return tbar;
}

Profile gaussian_target(const MomentVector& mv, double nu,
                        const VelocityGrid& vgrid) {
  if (!(nu >= -0.5 && nu < 1.0))
    throw DomainError("ES-BGK parameter nu must lie in [-1/2, 1), got " +
                      std::to_string(nu));
  if (nu == 0.0) return maxwellian(mv, vgrid);
  Profile out(vgrid.size());
  gaussian(mv.rho, mv.u, blended_temperature(mv, nu), vgrid, out);
  return out;
}

double profile_entropy(std::span<const double> g, const VelocityGrid& vgrid) {
  double s = 0.0;
  for (double x : g) {
    if (x < 0.0) throw InvalidStateError("entropy of a negative density");
    if (x > 0.0) s += x * std::log(x);
  }
  return s * vgrid.weight();
}

double discrete_entropy(const DistributionField& f, const SpatialGrid& grid,
                        const VelocityGrid& vgrid) {
  double s = 0.0;
  for (int j = 0; j < f.nx(); ++j) s += profile_entropy(f.row(j), vgrid);
  return grid.dx * s;
}

std::array<double, 3> relative_drift(const ConservedMoments& before,
                                     const ConservedMoments& after) {
  const double floor = std::abs(before.mass);
  auto rel = [floor](double b, double a) {
    const double den = std::max(std::abs(b), floor);
    return den > 0.0 ? std::abs(a - b) / den : std::abs(a - b);
  };
  return {rel(before.mass, after.mass),
          rel(before.momentum[0], after.momentum[0]),
          rel(before.energy, after.energy)};
}

std::array<double, 3> moment_drift(std::span<const double> before,
                                   std::span<const double> after,
                                   const VelocityGrid& vgrid) {
  return relative_drift(conserved_moments(before, vgrid),
                        conserved_moments(after, vgrid));
}

ConservedMoments field_moments(const DistributionField& f, const SpatialGrid& grid,
                               const VelocityGrid& vgrid) {
  ConservedMoments total;
  for (int j = 0; j < f.nx(); ++j) {
    const ConservedMoments c = conserved_moments(f.row(j), vgrid);
    total.mass += c.mass;
    total.momentum += c.momentum;
    total.energy += c.energy;
  }
  total.mass *= grid.dx;
  total.momentum *= grid.dx;
  total.energy *= grid.dx;
  return total;
}

std::array<double, 3> conservation_drift(const DistributionField& before,
                                         const DistributionField& after,
                                         const SpatialGrid& grid,
                                         const VelocityGrid& vgrid) {
  if (!before.same_shape(after)) throw ConfigError("field shape mismatch");
  return relative_drift(field_moments(before, grid, vgrid),
                        field_moments(after, grid, vgrid));
}

}  // namespace kinex
