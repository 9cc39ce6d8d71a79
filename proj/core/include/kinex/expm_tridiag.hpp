#pragma once

// Tridiagonal operators of the discretised Fokker-Planck collision term and
// the action of their matrix exponentials.

#include <Eigen/Dense>
#include <atomic>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "kinex/grid.hpp"

namespace kinex {

/// Symmetric tridiagonal matrix: `diag` has n entries, `off` has n-1.
struct SymTridiag {
  std::vector<double> diag;
  std::vector<double> off;

  std::size_t size() const { return diag.size(); }
  void apply(std::span<const double> x, std::span<double> y) const;
  Eigen::MatrixXd dense() const;
};

/// General tridiagonal matrix.  lower[i] = A(i+1, i), upper[i] = A(i, i+1).
struct Tridiag {
  std::vector<double> lower;
  std::vector<double> diag;
  std::vector<double> upper;

  std::size_t size() const { return diag.size(); }
  void apply(std::span<const double> x, std::span<double> y) const;
  Eigen::MatrixXd dense() const;
  /// Largest absolute row sum.
  double inf_norm() const;
};

/// Symmetrised Fokker-Planck matrix from point values of the Maxwellian.
/// Interior rows: diag = -(sqrt(M_{i-1}) + sqrt(M_{i+1})) / (sqrt(M_i) dv^2),
/// off = 1/dv^2.  The first and last rows drop the missing neighbour
/// (zero-flux ends), so sqrt(M) spans the kernel.
/// Throws DomainError if any M_i <= 0.
SymTridiag build_fp_matrix(std::span<const double> maxwellian_values, double dv);

/// sqrt(M_{i+1} / M_i) for a Maxwellian with bulk velocity u and temperature
/// T, evaluated in closed form so that tails never underflow.
std::vector<double> fp_half_ratios(double u, double T, const VelocityGrid& vgrid);

/// Same matrix as build_fp_matrix, from (u, T) through fp_half_ratios.
SymTridiag build_fp_matrix(double u, double T, const VelocityGrid& vgrid);

/// The Fokker-Planck operator acting on f itself (not on f / sqrt(M)):
/// (Q f)_i = (F_{i+1/2} - F_{i-1/2}) / dv with
/// F_{i+1/2} = sqrt(M_i M_{i+1}) (f_{i+1}/M_{i+1} - f_i/M_i) / dv and zero
/// flux at both ends.  Columns sum to zero; M is a right null vector.
Tridiag fp_flux_operator(double u, double T, const VelocityGrid& vgrid);

/// Eigen-decomposition of a symmetric tridiagonal matrix, reusable for any
/// number of exponentials exp(sA) x.
class SymTridiagEigen {
 public:
  explicit SymTridiagEigen(const SymTridiag& a);

  std::vector<double> apply(double s, std::span<const double> x) const;
  const Eigen::VectorXd& eigenvalues() const { return values_; }
  const Eigen::MatrixXd& eigenvectors() const { return vectors_; }

 private:
  Eigen::VectorXd values_;
  Eigen::MatrixXd vectors_;
};

/// exp(sA) x through the symmetric tridiagonal eigen-decomposition.
std::vector<double> expm_apply(const SymTridiag& a, double s,
                               std::span<const double> x);

/// exp(sA) x for a tridiagonal A whose spectrum lies in the closed left
/// half-line (e.g. a similarity transform of a negative semi-definite
/// symmetric matrix).  Uses a truncated Taylor series when s*||A|| <= 1 and
/// otherwise a 24-node contour-integral rational approximation of exp on
/// (-inf, 0], each node costing one pivoted tridiagonal solve.
std::vector<double> expm_action(const Tridiag& a, double s,
                                std::span<const double> x);

/// Scalar rational approximation behind expm_action: r(lambda) ~ exp(lambda)
/// for lambda <= 0.
double rational_exp(double lambda);

/// LU factorisation of a tridiagonal matrix with partial pivoting.
template <class T>
class TridiagLU {
 public:
  TridiagLU(std::vector<T> lower, std::vector<T> diag, std::vector<T> upper);
  /// Overwrites b with A^{-1} b.
  void solve(std::span<T> b) const;

 private:
  std::vector<T> dl_, d_, du_, du2_;
  std::vector<std::size_t> piv_;
};

/// Dense (I - c A)^{-1}.
Eigen::MatrixXd resolvent_matrix(const SymTridiag& a, double c);

struct ClampReport {
  std::size_t count = 0;
  double removed = 0.0;   // sum of clipped negative magnitudes
  double relative = 0.0;  // removed / sum of remaining positive entries
};

/// Relative clipped mass above which clamp_nonneg flags a warning.
inline constexpr double kClampWarnThreshold = 1e-8;

/// v <- max(v, 0) entrywise.
ClampReport clamp_nonneg(std::span<double> v);

/// Number of clamp_nonneg calls that exceeded kClampWarnThreshold.
std::size_t clamp_warning_count();
void reset_clamp_warning_count();

}  // namespace kinex
