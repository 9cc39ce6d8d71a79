#include "kinex/expm_tridiag.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "kinex/errors.hpp"

namespace kinex {

void SymTridiag::apply(std::span<const double> x, std::span<double> y) const {
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    double acc = diag[i] * x[i];
    if (i > 0) acc += off[i - 1] * x[i - 1];
    if (i + 1 < n) acc += off[i] * x[i + 1];
    y[i] = acc;
  }
}

Eigen::MatrixXd SymTridiag::dense() const {
  const auto n = static_cast<Eigen::Index>(size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, i) = diag[static_cast<std::size_t>(i)];
    if (i + 1 < n) a(i, i + 1) = a(i + 1, i) = off[static_cast<std::size_t>(i)];
  }
  return a;
}

void Tridiag::apply(std::span<const double> x, std::span<double> y) const {
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    double acc = diag[i] * x[i];
    if (i > 0) acc += lower[i - 1] * x[i - 1];
    if (i + 1 < n) acc += upper[i] * x[i + 1];
    y[i] = acc;
  }
}

Eigen::MatrixXd Tridiag::dense() const {
  const auto n = static_cast<Eigen::Index>(size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, i) = diag[static_cast<std::size_t>(i)];
    if (i + 1 < n) {
      a(i, i + 1) = upper[static_cast<std::size_t>(i)];
      a(i + 1, i) = lower[static_cast<std::size_t>(i)];
    }
  }
  return a;
}

double Tridiag::inf_norm() const {
  const std::size_t n = size();
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = std::abs(diag[i]);
    if (i > 0) row += std::abs(lower[i - 1]);
    if (i + 1 < n) row += std::abs(upper[i]);
    best = std::max(best, row);
  }
  return best;
}

SymTridiag build_fp_matrix(std::span<const double> maxwellian_values, double dv) {
  const std::size_t n = maxwellian_values.size();
  if (n < 2) throw ConfigError("Fokker-Planck matrix needs at least 2 nodes");
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(maxwellian_values[i] > 0.0))
      throw DomainError("Maxwellian value at node " + std::to_string(i) +
                        " is not positive");
    sq[i] = std::sqrt(maxwellian_values[i]);
  }
  const double h2 = 1.0 / (dv * dv);
  SymTridiag a;
  a.diag.resize(n);
  a.off.assign(n - 1, h2);
  for (std::size_t i = 0; i < n; ++i) {
    double neighbours = 0.0;
    if (i > 0) neighbours += sq[i - 1];
    if (i + 1 < n) neighbours += sq[i + 1];
    a.diag[i] = -h2 * neighbours / sq[i];
  }
  return a;
}

std::vector<double> fp_half_ratios(double u, double T, const VelocityGrid& vgrid) {
  if (!(T > 0.0)) throw DomainError("Fokker-Planck operator needs T > 0");
  const auto& v = vgrid.points;
  std::vector<double> r(v.size() - 1);
  const double scale = vgrid.dv / (4.0 * T);
  for (std::size_t i = 0; i + 1 < v.size(); ++i)
    r[i] = std::exp(-scale * (v[i] + v[i + 1] - 2.0 * u));
  return r;
}

SymTridiag build_fp_matrix(double u, double T, const VelocityGrid& vgrid) {
  const auto r = fp_half_ratios(u, T, vgrid);
  const std::size_t n = r.size() + 1;
  const double h2 = 1.0 / (vgrid.dv * vgrid.dv);
  SymTridiag a;
  a.diag.resize(n);
  a.off.assign(n - 1, h2);
  for (std::size_t i = 0; i < n; ++i) {
    double d = 0.0;
    if (i + 1 < n) d += r[i];
    if (i > 0) d += 1.0 / r[i - 1];
    a.diag[i] = -h2 * d;
  }
  return a;
}

Tridiag fp_flux_operator(double u, double T, const VelocityGrid& vgrid) {
  const auto r = fp_half_ratios(u, T, vgrid);
  const std::size_t n = r.size() + 1;
  const double h2 = 1.0 / (vgrid.dv * vgrid.dv);
  Tridiag q;
  q.diag.resize(n);
  q.lower.resize(n - 1);
  q.upper.resize(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    q.upper[i] = h2 / r[i];
    q.lower[i] = h2 * r[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    double d = 0.0;
    if (i + 1 < n) d += r[i];
    if (i > 0) d += 1.0 / r[i - 1];
    q.diag[i] = -h2 * d;
  }
  return q;
}

SymTridiagEigen::SymTridiagEigen(const SymTridiag& a) {
  const auto n = static_cast<Eigen::Index>(a.size());
  Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(a.diag.data(), n);
  Eigen::VectorXd e = Eigen::Map<const Eigen::VectorXd>(a.off.data(), n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success)
    throw NumericalError("symmetric tridiagonal eigen-solver failed for n = " +
                         std::to_string(n) + " (diag range [" +
                         std::to_string(d.minCoeff()) + ", " +
                         std::to_string(d.maxCoeff()) + "])");
  values_ = solver.eigenvalues();
  vectors_ = solver.eigenvectors();
}

std::vector<double> SymTridiagEigen::apply(double s,
                                           std::span<const double> x) const {
  const auto n = values_.size();
  if (static_cast<Eigen::Index>(x.size()) != n)
    throw ConfigError("vector length does not match matrix size");
  Eigen::Map<const Eigen::VectorXd> xv(x.data(), n);
  Eigen::VectorXd coeff = vectors_.transpose() * xv;
  for (Eigen::Index k = 0; k < n; ++k) coeff[k] *= std::exp(s * values_[k]);
  std::vector<double> out(x.size());
  Eigen::Map<Eigen::VectorXd>(out.data(), n) = vectors_ * coeff;
  return out;
}

std::vector<double> expm_apply(const SymTridiag& a, double s,
                               std::span<const double> x) {
  if (s == 0.0) return {x.begin(), x.end()};
  return SymTridiagEigen(a).apply(s, x);
}

template <class T>
TridiagLU<T>::TridiagLU(std::vector<T> lower, std::vector<T> diag,
                        std::vector<T> upper)
    : dl_(std::move(lower)), d_(std::move(diag)), du_(std::move(upper)) {
  const std::size_t n = d_.size();
  du2_.assign(n > 2 ? n - 2 : 0, T{});
  piv_.resize(n);
  for (std::size_t i = 0; i < n; ++i) piv_[i] = i;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(d_[i]) >= std::abs(dl_[i])) {
      if (d_[i] != T{}) {
        const T fact = dl_[i] / d_[i];
        dl_[i] = fact;
        d_[i + 1] -= fact * du_[i];
      }
    } else {
      const T fact = d_[i] / dl_[i];
      d_[i] = dl_[i];
      dl_[i] = fact;
      const T temp = du_[i];
      du_[i] = d_[i + 1];
      d_[i + 1] = temp - fact * d_[i + 1];
      if (i + 2 < n) {
        du2_[i] = du_[i + 1];
        du_[i + 1] = -fact * du_[i + 1];
      }
      piv_[i] = i + 1;
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (d_[i] == T{})
      throw NumericalError("singular tridiagonal system (zero pivot at row " +
                           std::to_string(i) + ")");
}

template <class T>
void TridiagLU<T>::solve(std::span<T> b) const {
  const std::size_t n = d_.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (piv_[i] == i) {
      b[i + 1] -= dl_[i] * b[i];
    } else {
      const T temp = b[i];
      b[i] = b[i + 1];
      b[i + 1] = temp - dl_[i] * b[i];
    }
  }
  b[n - 1] /= d_[n - 1];
  if (n > 1) b[n - 2] = (b[n - 2] - du_[n - 2] * b[n - 1]) / d_[n - 2];
  for (std::size_t k = n; k-- > 2;) {
    const std::size_t i = k - 2;
    b[i] = (b[i] - du_[i] * b[i + 1] - du2_[i] * b[i + 2]) / d_[i];
  }
}

template class TridiagLU<double>;
template class TridiagLU<std::complex<double>>;

namespace {

// Midpoint rule on the cotangent contour
// z(t) = N (0.5017 t cot(0.6407 t) - 0.6122 + 0.2645 i t), t in (-pi, pi),
// applied to exp(lambda) = (2 pi i)^{-1} \int e^z / (z - lambda) dz.
// Nodes come in conjugate pairs; only the upper half is stored.
constexpr int kContourNodes = 24;

struct ContourRule {
  std::array<std::complex<double>, kContourNodes / 2> z;
  std::array<std::complex<double>, kContourNodes / 2> w;

  ContourRule() {
    constexpr double n = kContourNodes;
    const double h = 2.0 * std::numbers::pi / n;
    for (int k = 0; k < kContourNodes / 2; ++k) {
      const double t = (k + 0.5) * h;
      const double c = 0.6407 * t;
      const double cot = std::cos(c) / std::sin(c);
      const double sin2 = std::sin(c) * std::sin(c);
      const std::complex<double> zk(n * (0.5017 * t * cot - 0.6122), n * 0.2645 * t);
      const std::complex<double> dz(n * (0.5017 * cot - 0.5017 * c / sin2),
                                    n * 0.2645);
      z[static_cast<std::size_t>(k)] = zk;
      w[static_cast<std::size_t>(k)] =
          std::exp(zk) * dz * h / std::complex<double>(0.0, 2.0 * std::numbers::pi);
    }
  }
};

const ContourRule& contour_rule() {
  static const ContourRule rule;
  return rule;
}

std::vector<double> taylor_action(const Tridiag& a, double s,
                                  std::span<const double> x) {
  std::vector<double> out(x.begin(), x.end());
  std::vector<double> term(x.begin(), x.end());
  std::vector<double> next(x.size());
  double xnorm = 0.0;
  for (double v : x) xnorm = std::max(xnorm, std::abs(v));
  for (int k = 1; k < 64; ++k) {
    a.apply(term, next);
    double tnorm = 0.0;
    const double f = s / k;
    for (std::size_t i = 0; i < x.size(); ++i) {
      term[i] = f * next[i];
      out[i] += term[i];
      tnorm = std::max(tnorm, std::abs(term[i]));
    }
    if (tnorm <= 1e-18 * xnorm) break;
  }
  return out;
}

}  // namespace

double rational_exp(double lambda) {
  const auto& rule = contour_rule();
  double acc = 0.0;
  for (std::size_t k = 0; k < rule.z.size(); ++k)
    acc += 2.0 * std::real(rule.w[k] / (rule.z[k] - lambda));
  return acc;
}

std::vector<double> expm_action(const Tridiag& a, double s,
                                std::span<const double> x) {
  if (x.size() != a.size()) throw ConfigError("vector length does not match matrix size");
  if (s == 0.0) return {x.begin(), x.end()};
  if (s < 0.0) throw DomainError("exponential action needs s >= 0");
  if (s * a.inf_norm() <= 1.0) return taylor_action(a, s, x);

  const auto& rule = contour_rule();
  constexpr std::size_t P = kContourNodes / 2;
  const std::size_t n = a.size();
  // One shifted system per pole, eliminated with partial pivoting.  The
  // poles are swept together row by row so their dependency chains overlap;
  // complex values are kept as split real and imaginary parts.
  using Row = std::array<double, P>;
  std::vector<Row> dr(n), di(n), ur(n), ui(n), u2r(n), u2i(n), br(n), bi(n), ir(n), ii(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double up = i + 1 < n ? -s * a.upper[i] : 0.0;
    for (std::size_t k = 0; k < P; ++k) {
      dr[i][k] = rule.z[k].real() - s * a.diag[i];
      di[i][k] = rule.z[k].imag();
      ur[i][k] = up;
      ui[i][k] = 0.0;
      u2r[i][k] = u2i[i][k] = 0.0;
      br[i][k] = x[i];
      bi[i][k] = 0.0;
    }
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double l = -s * a.lower[i];
    for (std::size_t k = 0; k < P; ++k) {
      if (dr[i][k] * dr[i][k] + di[i][k] * di[i][k] >= l * l) {
        const double inv = 1.0 / (dr[i][k] * dr[i][k] + di[i][k] * di[i][k]);
        ir[i][k] = dr[i][k] * inv;
        ii[i][k] = -di[i][k] * inv;
        const double fr = l * ir[i][k], fi = l * ii[i][k];
        dr[i + 1][k] -= fr * ur[i][k] - fi * ui[i][k];
        di[i + 1][k] -= fr * ui[i][k] + fi * ur[i][k];
        br[i + 1][k] -= fr * br[i][k] - fi * bi[i][k];
        bi[i + 1][k] -= fr * bi[i][k] + fi * br[i][k];
      } else {
        // Swap rows i and i+1; the pivot becomes the real entry l.
        const double fr = dr[i][k] / l, fi = di[i][k] / l;
        const double row_ur = ur[i][k], row_ui = ui[i][k];
        const double nd_r = dr[i + 1][k], nd_i = di[i + 1][k];
        const double nu_r = ur[i + 1][k], nu_i = ui[i + 1][k];
        dr[i][k] = l;
        di[i][k] = 0.0;
        ir[i][k] = 1.0 / l;
        ii[i][k] = 0.0;
        ur[i][k] = nd_r;
        ui[i][k] = nd_i;
        u2r[i][k] = nu_r;
        u2i[i][k] = nu_i;
        dr[i + 1][k] = row_ur - (fr * nd_r - fi * nd_i);
        di[i + 1][k] = row_ui - (fr * nd_i + fi * nd_r);
        ur[i + 1][k] = -(fr * nu_r - fi * nu_i);
        ui[i + 1][k] = -(fr * nu_i + fi * nu_r);
        std::swap(br[i][k], br[i + 1][k]);
        std::swap(bi[i][k], bi[i + 1][k]);
        br[i + 1][k] -= fr * br[i][k] - fi * bi[i][k];
        bi[i + 1][k] -= fr * bi[i][k] + fi * br[i][k];
      }
    }
  }
  for (std::size_t k = 0; k < P; ++k) {
    const double m = dr[n - 1][k] * dr[n - 1][k] + di[n - 1][k] * di[n - 1][k];
    if (m == 0.0) throw NumericalError("singular shifted system in exponential action");
    ir[n - 1][k] = dr[n - 1][k] / m;
    ii[n - 1][k] = -di[n - 1][k] / m;
  }
  std::vector<double> out(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double sum = 0.0;
    for (std::size_t k = 0; k < P; ++k) {
      double rr = br[i][k], ri = bi[i][k];
      if (i + 1 < n) {
        rr -= ur[i][k] * br[i + 1][k] - ui[i][k] * bi[i + 1][k];
        ri -= ur[i][k] * bi[i + 1][k] + ui[i][k] * br[i + 1][k];
      }
      if (i + 2 < n) {
        rr -= u2r[i][k] * br[i + 2][k] - u2i[i][k] * bi[i + 2][k];
        ri -= u2r[i][k] * bi[i + 2][k] + u2i[i][k] * br[i + 2][k];
      }
      br[i][k] = rr * ir[i][k] - ri * ii[i][k];
      bi[i][k] = rr * ii[i][k] + ri * ir[i][k];
      const std::complex<double> w = rule.w[k];
      sum += 2.0 * (w.real() * br[i][k] - w.imag() * bi[i][k]);
    }
    out[i] = sum;
  }
  return out;
}

Eigen::MatrixXd resolvent_matrix(const SymTridiag& a, double c) {
  const std::size_t n = a.size();
  std::vector<double> lower(n - 1), upper(n - 1), diag(n);
  for (std::size_t i = 0; i + 1 < n; ++i) lower[i] = upper[i] = -c * a.off[i];
  for (std::size_t i = 0; i < n; ++i) diag[i] = 1.0 - c * a.diag[i];
  TridiagLU<double> lu(lower, diag, upper);
  const auto ni = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd inv(ni, ni);
  std::vector<double> col(n);
  for (Eigen::Index k = 0; k < ni; ++k) {
    std::fill(col.begin(), col.end(), 0.0);
    col[static_cast<std::size_t>(k)] = 1.0;
    lu.solve(std::span<double>(col));
    inv.col(k) = Eigen::Map<Eigen::VectorXd>(col.data(), ni);
  }
  return inv;
}

namespace {
std::atomic<std::size_t> g_clamp_warnings{0};
}

ClampReport clamp_nonneg(std::span<double> v) {
  ClampReport rep;
  double positive = 0.0;
  for (double& x : v) {
    if (x < 0.0) {
      ++rep.count;
      rep.removed -= x;
      x = 0.0;
    } else {
      positive += x;
    }
  }
  if (rep.removed > 0.0) {
    rep.relative = positive > 0.0 ? rep.removed / positive
                                  : std::numeric_limits<double>::infinity();
    if (rep.relative > kClampWarnThreshold) ++g_clamp_warnings;
  }
  return rep;
}

std::size_t clamp_warning_count() { return g_clamp_warnings.load(); }
void reset_clamp_warning_count() { g_clamp_warnings.store(0); }

}  // namespace kinex
