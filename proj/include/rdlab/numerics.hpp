#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "rdlab/common.hpp"

namespace rdlab::numerics {

/// Adaptive Simpson quadrature of f over [a, b]. `tol` is an absolute target
/// for the whole interval; recursion splits it in the usual way.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12, int max_depth = 48);

/// Fixed-order Gauss-Legendre rule, exact for polynomials of degree 39.
/// Meant for short smooth panels where adaptivity would be wasted.
double gauss20(const std::function<double(double)>& f, double a, double b);

/// Root of f in [lo, hi] by bisection with Newton refinement when `df` is
/// supplied. Requires a sign change on the bracket.
double find_root(const std::function<double(double)>& f, double lo, double hi,
                 double tol = 1e-12, const std::function<double(double)>& df = nullptr);

/// Solves a tridiagonal system in place. `sub` and `sup` have size n-1,
/// `diag` and `rhs` size n; the answer overwrites `rhs`. Plain Thomas
/// elimination, valid for the diagonally dominant matrices built here.
void solve_tridiagonal(Eigen::ArrayXd& sub, Eigen::ArrayXd& diag, Eigen::ArrayXd& sup,
                       Eigen::ArrayXd& rhs);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Least-squares line through (x, y).
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Natural cubic spline through strictly increasing knots.
class CubicSpline {
public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> xs, std::vector<double> ys);

  double operator()(double x) const;
  double derivative(double x) const;
  double x_min() const { return xs_.front(); }
  double x_max() const { return xs_.back(); }

private:
  std::vector<double> xs_, ys_, m_; // m_ = second derivatives at knots
  std::size_t locate(double x) const;
};

/// printf "%.17g" — the fixed float format used by every CSV/JSON artifact.
std::string fmt_g17(double v);

/// FNV-1a over a byte string, reported as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

/// Runs fn over [0, count) with at most `workers` concurrent tasks.
/// Results keep index order. fn must be safe to call concurrently.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

} // namespace rdlab::numerics
