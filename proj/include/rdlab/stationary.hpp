#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

#include "rdlab/field.hpp"
#include "rdlab/nonlin.hpp"

namespace rdlab {

struct BumpDecay {
  bool exponential = true;
  double rate = 0.0;     // mu for exponential tails
  double exponent = 0.0; // 2/(p-1) for algebraic tails
};

/// The stationary bump v: v'' + f(v) = 0, v(0) = theta_star, v -> 0.
struct BumpProfile {
  double theta_star = 0.0;
  Grid grid;
  Eigen::ArrayXd vs;
  double E0 = 0.0; // 2 sqrt(2) int_0^{theta*} sqrt(V)
  BumpDecay decay;

  Field as_field() const { return Field(grid, vs); }
};

/// Solves |x| = int_v^{theta*} du / sqrt(2 V(u)) for v at every grid node.
/// The peak singularity is handled by the substitution u = theta* - s^2 and
/// the far tail in logarithmic coordinates. Requires a bistable nonlinearity
/// with V(1) < 0; degenerate V'(theta*) = 0 is refused.
BumpProfile bump(const Nonlinearity& n, const Grid& grid);

/// Bump values on an arbitrary grid: interior by monotone interpolation of
/// the computed profile, beyond its reach by the decay tail.
Eigen::ArrayXd sample_bump(const BumpProfile& profile, const Grid& grid);

/// Traveling front of u_t = u_xx + f(u) invading u = 0.
struct FrontProfile {
  double c_dagger = 0.0;
  Eigen::ArrayXd xs; // centered so u crosses 1/2 at x = 0
  Eigen::ArrayXd us; // decreasing 1 -> 0
};

/// Front by shooting from the u = 1 saddle along its unstable direction,
/// bisecting the speed on the overshoot/undershoot dichotomy until the
/// bracket is below 1e-8. For ignition the linear tail below theta0 is
/// matched analytically. Requires bistable or ignition kind and a bracket
/// that straddles the dichotomy.
FrontProfile front(const Nonlinearity& n, std::pair<double, double> c_bracket);

/// Front values resampled on [x_lo, x_hi] with spacing dx; constant 1 left
/// of the computed profile, 0 to the right.
Eigen::ArrayXd sample_front(const FrontProfile& profile, double x_lo, double dx,
                            Eigen::Index count);

struct SpectralReport {
  double nu0_L = 0.0;             // principal Dirichlet eigenvalue on [-L, L]
  double rayleigh_at_vprime = 0.0;
  LineField eigenfunction;        // positive in (-L, L)
};

/// Principal eigenvalue of -d^2/dx^2 - f'(v(x)) on [-L, L] (Dirichlet) by
/// inverse iteration on the tridiagonal discretization, plus the Rayleigh
/// quotient evaluated at the discrete v'.
SpectralReport spectral_check(const BumpProfile& profile, const Nonlinearity& n, double L);

/// Profile CSV with metadata header lines (theta_star, E0 / c_dagger).
void write_bump_csv(const std::string& path, const BumpProfile& profile);
void write_front_csv(const std::string& path, const FrontProfile& profile);

} // namespace rdlab
