#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>

#include "rdlab/common.hpp"

namespace rdlab {

/// Ascending wiggles up to this size are treated as round-off and clipped.
inline constexpr double kMonotonicitySlack = 1e-10;

/// Uniform half-line grid. Node 0 sits on the symmetry axis x = 0.
struct Grid {
  double dx = 0.0;
  Eigen::Index n = 0;

  double length() const { return dx * double(n - 1); } // L
  double x(Eigen::Index i) const { return dx * double(i); }
  Eigen::ArrayXd xs() const;

  static Grid from_length(double dx, double L);
};

/// Symmetric decreasing profile stored on the half-line x >= 0. The full
/// line is recovered by even reflection.
struct Field {
  Grid grid;
  Eigen::ArrayXd values;

  Field() = default;
  Field(Grid g, Eigen::ArrayXd v);

  double max() const { return values.size() ? values.maxCoeff() : 0.0; }
  double at_origin() const { return values.size() ? values[0] : 0.0; }
  double far_value() const { return values.size() ? values[values.size() - 1] : 0.0; }
};

/// Plain full-line profile, for the moving-frame solver and the weighted
/// functionals on translated data.
struct LineField {
  double x0 = 0.0; // coordinate of node 0
  double dx = 0.0;
  Eigen::ArrayXd values;

  Eigen::Index n() const { return values.size(); }
  double x(Eigen::Index i) const { return x0 + dx * double(i); }
};

/// Builds a field by sampling fn(x) on the grid and repairing to (SD).
Field make_field(const Grid& grid, const std::function<double(double)>& fn);

/// Clamps negatives to zero and clips ascending wiggles so the profile is
/// exactly non-increasing on the half-line.
void repair_symmetric_decreasing(Field& field);

/// True when u >= 0 and u_{i+1} <= u_i + slack everywhere.
bool is_symmetric_decreasing(const Field& field, double slack = kMonotonicitySlack);

/// Even reflection onto [-L, L].
LineField reflect(const Field& field);

/// Shift by a = k dx (exact node shift; throws NumericError otherwise).
/// Vacated nodes are zero-filled.
LineField translate(const LineField& lf, double a);

/// Composite trapezoid value of 2 int_0^L integrand(u(x)) dx, i.e. the
/// full-line integral of an even per-node integrand.
double quadrature(const Field& field, const std::function<double(double)>& integrand);

struct WeightedNorms {
  double l2c = 0.0; // int e^{cx} u^2 dx over [-L, L]
  double h1c = 0.0; // l2c plus the same integral of u_x^2
};

/// Exponentially weighted integrals over the reflected line; derivatives by
/// centered differences. Requires c > 0 and c*L <= 600 (overflow guard).
WeightedNorms weighted_norms(const Field& field, double c);

/// Rightmost crossing of u = delta, linearly interpolated; -infinity when
/// the super-level set is empty.
double leading_edge(const Field& field, double delta);

/// Zero-pads the field onto a longer grid with the same spacing.
Field expand_to(const Field& field, const Grid& larger);

/// Snapshot CSV with columns x,u (half-line).
void write_field_csv(const std::string& path, const Field& field);
Field read_field_csv(const std::string& path);

} // namespace rdlab
