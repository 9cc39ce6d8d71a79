#include "kinex/transport.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "kinex/errors.hpp"

namespace kinex {

std::string_view to_string(TransportKind k) {
  return k == TransportKind::upwind1 ? "upwind1" : "weno5";
}

TransportKind parse_transport_kind(std::string_view name) {
  if (name == "upwind1" || name == "upwind") return TransportKind::upwind1;
  if (name == "weno5") return TransportKind::weno5;
  throw ConfigError("unknown transport scheme '" + std::string(name) +
                    "' (expected upwind1 or weno5)");
}

BoundaryGhosts BoundaryGhosts::periodic() { return {}; }

BoundaryGhosts BoundaryGhosts::dirichlet(std::vector<Profile> left,
                                         std::vector<Profile> right) {
  if (left.size() != width || right.size() != width)
    throw ConfigError("Dirichlet boundary needs three ghost profiles per side");
  BoundaryGhosts g;
  g.kind_ = BoundaryKind::dirichlet;
  g.left_ = std::move(left);
  g.right_ = std::move(right);
  return g;
}

BoundaryGhosts BoundaryGhosts::from_field_edges(const DistributionField& initial) {
  const auto first = initial.row(0);
  const auto last = initial.row(initial.nx() - 1);
  std::vector<Profile> left(width, Profile(first.begin(), first.end()));
  std::vector<Profile> right(width, Profile(last.begin(), last.end()));
  return dirichlet(std::move(left), std::move(right));
}

void BoundaryGhosts::extended_column(const DistributionField& f, std::size_t i,
                                     std::span<double> col) const {
  const int nx = f.nx();
  for (int j = 0; j < nx; ++j) col[static_cast<std::size_t>(j + width)] = f(j, i);
  for (int k = 0; k < width; ++k) {
    const auto lo = static_cast<std::size_t>(k);
    const auto hi = static_cast<std::size_t>(nx + width + k);
    if (kind_ == BoundaryKind::periodic) {
      col[lo] = f(nx - width + k, i);
      col[hi] = f(k, i);
    } else {
      if (left_[lo].size() != f.nv() || right_[lo].size() != f.nv())
        throw ConfigError("ghost profile length does not match the field");
      col[lo] = left_[lo][i];
      col[hi] = right_[lo][i];
    }
  }
}

double weno5_edge(double a, double b, double c, double d, double e) {
  const double q0 = (2.0 * a - 7.0 * b + 11.0 * c) / 6.0;
  const double q1 = (-b + 5.0 * c + 2.0 * d) / 6.0;
  const double q2 = (2.0 * c + 5.0 * d - e) / 6.0;
  const double t0 = a - 2.0 * b + c, s0 = a - 4.0 * b + 3.0 * c;
  const double t1 = b - 2.0 * c + d, s1 = b - d;
  const double t2 = c - 2.0 * d + e, s2 = 3.0 * c - 4.0 * d + e;
  const double b0 = 13.0 / 12.0 * t0 * t0 + 0.25 * s0 * s0;
  const double b1 = 13.0 / 12.0 * t1 * t1 + 0.25 * s1 * s1;
  const double b2 = 13.0 / 12.0 * t2 * t2 + 0.25 * s2 * s2;
  const double a0 = 0.1 / ((kWenoEpsilon + b0) * (kWenoEpsilon + b0));
  const double a1 = 0.6 / ((kWenoEpsilon + b1) * (kWenoEpsilon + b1));
  const double a2 = 0.3 / ((kWenoEpsilon + b2) * (kWenoEpsilon + b2));
  return (a0 * q0 + a1 * q1 + a2 * q2) / (a0 + a1 + a2);
}

TransportOperator::TransportOperator(TransportKind kind, bool limiter,
                                     SpatialGrid grid, VelocityGrid vgrid,
                                     BoundaryGhosts ghosts)
    : kind_(kind),
      limiter_(limiter),
      grid_(std::move(grid)),
      vgrid_(std::move(vgrid)),
      ghosts_(std::move(ghosts)) {
  if (vgrid_.dim != 1) throw ConfigError("transport needs a 1D velocity grid");
}

double TransportOperator::dt_fe_factor() const {
  return kind_ == TransportKind::upwind1 ? 1.0 : 1.0 / 12.0;
}

double TransportOperator::dt_fe() const {
  return dt_fe_factor() * grid_.dx / vgrid_.vmax;
}

void TransportOperator::rate(const DistributionField& f, DistributionField& out) const {
  const int nx = grid_.nx;
  if (f.nx() != nx || f.nv() != vgrid_.size())
    throw ConfigError("field shape does not match the transport grids");
  if (!out.same_shape(f)) out = DistributionField(nx, f.nv());

  constexpr int g = BoundaryGhosts::width;
  const std::size_t ncol = static_cast<std::size_t>(nx + 2 * g);
  std::vector<double> col(ncol);
  // Edge values of cells -1 .. nx, stored at index j + 1.
  std::vector<double> right_edge(static_cast<std::size_t>(nx + 2));
  std::vector<double> left_edge(static_cast<std::size_t>(nx + 2));
  std::vector<double> flux(static_cast<std::size_t>(nx + 1));
  const double inv_dx = 1.0 / grid_.dx;
  std::size_t limited = 0;

  for (std::size_t i = 0; i < f.nv(); ++i) {
    ghosts_.extended_column(f, i, col);
    const double v = vgrid_.points[i];
    const bool positive = v >= 0.0;

    if (kind_ == TransportKind::upwind1) {
      // flux[k] sits at the interface between cells k-1 and k.
      for (int k = 0; k <= nx; ++k) {
        const auto up = static_cast<std::size_t>(positive ? k - 1 + g : k + g);
        flux[static_cast<std::size_t>(k)] = v * col[up];
      }
    } else {
      for (int j = -1; j <= nx; ++j) {
        const std::size_t c = static_cast<std::size_t>(j + g);
        const std::size_t e = static_cast<std::size_t>(j + 1);
        const bool need_right = positive || limiter_;
        const bool need_left = !positive || limiter_;
        if (need_right)
          right_edge[e] = weno5_edge(col[c - 2], col[c - 1], col[c], col[c + 1], col[c + 2]);
        if (need_left)
          left_edge[e] = weno5_edge(col[c + 2], col[c + 1], col[c], col[c - 1], col[c - 2]);
        if (limiter_) {
          const double avg = col[c];
          const double r = right_edge[e], l = left_edge[e];
          if (!(avg > 0.0)) {
            // A vanishing average admits only the zero polynomial.
            if ((r != 0.0 || l != 0.0) && j >= 0 && j < nx) ++limited;
            right_edge[e] = 0.0;
            left_edge[e] = 0.0;
            continue;
          }
          const double interior = (avg - (l + r) / 12.0) / (1.0 - 2.0 / 12.0);
          const double m = std::min({l, r, interior});
          if (m < 0.0) {
            const double theta = avg / (avg - m);
            right_edge[e] = std::max(0.0, avg + theta * (r - avg));
            left_edge[e] = std::max(0.0, avg + theta * (l - avg));
            if (j >= 0 && j < nx) ++limited;
          }
        }
      }
      for (int k = 0; k <= nx; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        flux[kk] = v * (positive ? right_edge[kk] : left_edge[kk + 1]);
      }
    }
    for (int j = 0; j < nx; ++j) {
      const auto jj = static_cast<std::size_t>(j);
      out(j, i) = -(flux[jj + 1] - flux[jj]) * inv_dx;
    }
  }
  last_limited_ = limited;
}

DistributionField upwind_apply(const DistributionField& f, const SpatialGrid& grid,
                               const VelocityGrid& vgrid) {
  DistributionField out;
  TransportOperator(TransportKind::upwind1, false, grid, vgrid).rate(f, out);
  return out;
}

DistributionField weno5_apply(const DistributionField& f, const SpatialGrid& grid,
                              const VelocityGrid& vgrid, bool limiter) {
  DistributionField out;
  TransportOperator(TransportKind::weno5, limiter, grid, vgrid).rate(f, out);
  return out;
}

const std::array<double, kCheckPoints>& check_point_offsets() {
  static const std::array<double, kCheckPoints> offsets = {
      CellQuadrature::offsets[0], CellQuadrature::offsets[1],
      CellQuadrature::offsets[2], -0.5, 0.5};
  return offsets;
}

const std::array<std::array<double, 5>, kCheckPoints>& reconstruction_weights() {
  static const auto weights = [] {
    // Row k: averages of xi^m over the cell [k - 5/2, k - 3/2].
    Eigen::Matrix<double, 5, 5> avg;
    for (int k = 0; k < 5; ++k) {
      const double lo = k - 2.5, hi = k - 1.5;
      for (int m = 0; m < 5; ++m)
        avg(k, m) = (std::pow(hi, m + 1) - std::pow(lo, m + 1)) / (m + 1);
    }
    const Eigen::Matrix<double, 5, 5> inv = avg.inverse();
    std::array<std::array<double, 5>, kCheckPoints> w{};
    const auto& xs = check_point_offsets();
    for (int p = 0; p < kCheckPoints; ++p) {
      Eigen::Matrix<double, 1, 5> basis;
      for (int m = 0; m < 5; ++m) basis(m) = std::pow(xs[static_cast<std::size_t>(p)], m);
      const Eigen::Matrix<double, 1, 5> row = basis * inv;
      for (int m = 0; m < 5; ++m) w[static_cast<std::size_t>(p)][static_cast<std::size_t>(m)] = row(m);
    }
    return w;
  }();
  return weights;
}

CellPointValues reconstruct(std::span<const double, 5> averages) {
  const auto& w = reconstruction_weights();
  CellPointValues cell;
  cell.average = averages[2];
  for (std::size_t p = 0; p < kCheckPoints; ++p) {
    double acc = 0.0;
    for (std::size_t m = 0; m < 5; ++m) acc += w[p][m] * averages[m];
    cell.values[p] = acc;
  }
  return cell;
}

double positivity_limit(CellPointValues& cell) {
  const double a = cell.average;
  if (!(a >= 0.0))
    throw InvalidStateError("positivity limiter needs a nonnegative cell average, got " +
                            std::to_string(a));
  const double m = *std::min_element(cell.values.begin(), cell.values.end());
  if (m >= 0.0) return 1.0;
  const double theta = a / (a - m);
  // The clamp only removes roundoff below zero at the minimising point.
  for (double& x : cell.values) x = std::max(0.0, a + theta * (x - a));
  return theta;
}

CellReconstruction build_reconstruction(const DistributionField& f,
                                        const BoundaryGhosts& ghosts) {
  const int nx = f.nx();
  constexpr int g = BoundaryGhosts::width;
  CellReconstruction rec;
  for (auto& p : rec.points) p = DistributionField(nx, f.nv());
  std::vector<double> col(static_cast<std::size_t>(nx + 2 * g));
  for (std::size_t i = 0; i < f.nv(); ++i) {
    ghosts.extended_column(f, i, col);
    for (int j = 0; j < nx; ++j) {
      const std::span<const double, 5> window(col.data() + j + g - 2, 5);
      CellPointValues cell = reconstruct(window);
      // Negative averages only arise on paths without a positivity
      // guarantee; those cells keep the unlimited polynomial.
      if (cell.average >= 0.0 && positivity_limit(cell) < 1.0) ++rec.limited;
      for (int l = 0; l < 3; ++l)
        rec.points[static_cast<std::size_t>(l)](j, i) = cell.values[static_cast<std::size_t>(l)];
    }
  }
  return rec;
}

void gauss_point_collision(const DistributionField& f, const EpsilonField& eps,
                           double s_base, const HomogeneousSolver& solver,
                           ReconstructionKind recon, const BoundaryGhosts& ghosts,
                           DistributionField& out) {
  if (!(s_base >= 0.0)) throw DomainError("collision step needs s >= 0");
  if (&out != &f && !out.same_shape(f)) out = DistributionField(f.nx(), f.nv());
  if (s_base == 0.0) {
    if (&out != &f) out = f;
    return;
  }
  const int nx = f.nx();
  const std::size_t nv = f.nv();

  if (recon == ReconstructionKind::piecewise_constant) {
    if (eps.is_constant()) {
      for (int j = 0; j < nx; ++j) solver.apply(f.row(j), s_base / eps.center(j), out.row(j));
      return;
    }
    Profile cell(nv), acc(nv), tmp(nv);
    for (int j = 0; j < nx; ++j) {
      const auto row = f.row(j);
      std::copy(row.begin(), row.end(), cell.begin());
      std::fill(acc.begin(), acc.end(), 0.0);
      for (int l = 0; l < 3; ++l) {
        solver.apply(cell, s_base / eps.at(j, l), tmp);
        const double w = CellQuadrature::weights[static_cast<std::size_t>(l)];
        for (std::size_t i = 0; i < nv; ++i) acc[i] += w * tmp[i];
      }
      std::copy(acc.begin(), acc.end(), out.row(j).begin());
    }
    return;
  }

  const CellReconstruction rec = build_reconstruction(f, ghosts);
  Profile acc(nv), tmp(nv);
  for (int j = 0; j < nx; ++j) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (int l = 0; l < 3; ++l) {
      const auto lu = static_cast<std::size_t>(l);
      solver.apply(rec.points[lu].row(j), s_base / eps.at(j, l), tmp);
      const double w = CellQuadrature::weights[lu];
      for (std::size_t i = 0; i < nv; ++i) acc[i] += w * tmp[i];
    }
    std::copy(acc.begin(), acc.end(), out.row(j).begin());
  }
}

}  // namespace kinex
