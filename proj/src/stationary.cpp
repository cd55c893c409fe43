#include "rdlab/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <vector>

#include "rdlab/numerics.hpp"

namespace rdlab {

namespace {

using numerics::adaptive_simpson;
using numerics::gauss20;

/// Time-of-flight integral X(v) = int_v^{theta*} du / sqrt(2 V(u)) and its
/// nodewise inversion. The integrable 1/sqrt singularity at the peak is
/// removed by u = theta* - s^2; the far tail integrates in y = ln u where
/// the integrand flattens out.
class BumpInverter {
public:
  BumpInverter(const Nonlinearity& n, double theta_star)
      : n_(n), theta_(theta_star), f_peak_(n.f(theta_star)) {
    if (!(f_peak_ > 1e-12)) {
      throw NumericError("bump: degenerate potential (V'(theta*) = 0) refused");
    }
    v_switch_ = 0.5 * theta_;
  }

  double integrand_s(double s) const {
    if (s < 1e-7) return std::sqrt(2.0 / f_peak_);
    const double V = n_.V(theta_ - s * s);
    return 2.0 * s / std::sqrt(2.0 * V);
  }

  double integrand_log(double y) const {
    const double u = std::exp(y);
    return u / std::sqrt(2.0 * n_.V(u));
  }

  /// int_va^vb du / sqrt(2V) for 0 < va <= vb <= theta*.
  double segment(double va, double vb) const {
    if (vb <= va) return 0.0;
    double acc = 0.0;
    const double mid = std::clamp(v_switch_, va, vb);
    if (va < mid) { // tail piece in log coordinates
      acc += gauss20([this](double y) { return integrand_log(y); }, std::log(va), std::log(mid));
    }
    if (mid < vb) { // peak piece in s coordinates; s decreases as u grows
      const double sa = std::sqrt(std::max(theta_ - vb, 0.0));
      const double sb = std::sqrt(theta_ - mid);
      acc += gauss20([this](double s) { return integrand_s(s); }, sa, sb);
    }
    return acc;
  }

  /// Marches the grid: solves X(v_j) = x_j using the previous node as the
  /// exactly-known reference point.
  Eigen::ArrayXd invert_on(const Grid& grid) const {
    Eigen::ArrayXd vs(grid.n);
    vs[0] = theta_;
    double v_ref = theta_;
    double x_ref = 0.0;
    for (Eigen::Index j = 1; j < grid.n; ++j) {
      const double target = grid.x(j) - x_ref; // remaining flight time from v_ref
      double hi = v_ref;                       // g(hi) <= 0
      double lo = v_ref;
      double g_lo = -1.0;
      do { // bracket: push lo down until the segment overshoots the target
        lo *= 0.5;
        if (lo < 1e-280) break;
        g_lo = segment(lo, v_ref) - target;
      } while (g_lo < 0.0);
      double v = std::max(lo, 0.5 * (lo + hi));
      for (int iter = 0; iter < 80; ++iter) {
        const double g = segment(v, v_ref) - target;
        if (g > 0.0) {
          lo = v;
        } else {
          hi = v;
        }
        const double dg = -1.0 / std::sqrt(2.0 * std::max(n_.V(v), 1e-300));
        double next = v - g / dg;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - v) < 1e-15 * theta_ && std::abs(g) < 1e-12 * (1.0 + grid.x(j))) {
          v = next;
          break;
        }
        v = next;
      }
      vs[j] = v;
      v_ref = v;
      x_ref = grid.x(j);
    }
    return vs;
  }

private:
  const Nonlinearity& n_;
  double theta_;
  double f_peak_;
  double v_switch_;
};

double bump_energy_constant(const Nonlinearity& n, double theta_star) {
  // E0 = 2 sqrt(2) int_0^{theta*} sqrt(V); split so both pieces are smooth.
  const double mid = 0.5 * theta_star;
  const double left =
      adaptive_simpson([&n](double u) { return std::sqrt(std::max(n.V(u), 0.0)); }, 0.0, mid,
                       1e-13);
  const double right = adaptive_simpson(
      [&n, theta_star](double s) {
        return 2.0 * s * std::sqrt(std::max(n.V(theta_star - s * s), 0.0));
      },
      0.0, std::sqrt(theta_star - mid), 1e-13);
  return 2.0 * std::sqrt(2.0) * (left + right);
}

} // namespace

BumpProfile bump(const Nonlinearity& n, const Grid& grid) {
  if (n.kind != NonlinKind::Bistable) {
    throw ConfigError("bump: requires a bistable nonlinearity");
  }
  if (!n.theta_star || !(n.V(1.0) < 0.0)) {
    throw NumericError("bump: balanced potential (no root of V in (0,1))");
  }
  BumpProfile profile;
  profile.theta_star = *n.theta_star;
  profile.grid = grid;
  BumpInverter inverter(n, profile.theta_star);
  profile.vs = inverter.invert_on(grid);
  profile.E0 = bump_energy_constant(n, profile.theta_star);
  const double fp0 = n.f_prime(0.0);
  if (fp0 < -1e-12) {
    profile.decay.exponential = true;
    profile.decay.rate = std::sqrt(-fp0);
  } else {
    if (!n.decay_p || !(*n.decay_p > 1.0)) {
      throw NumericError("bump: algebraic decay tag needs the power-law exponent p > 1");
    }
    profile.decay.exponential = false;
    profile.decay.exponent = 2.0 / (*n.decay_p - 1.0);
  }
  return profile;
}

Eigen::ArrayXd sample_bump(const BumpProfile& profile, const Grid& grid) {
  Eigen::ArrayXd out(grid.n);
  const double Lp = profile.grid.length();
  const double v_end = profile.vs[profile.grid.n - 1];
  for (Eigen::Index i = 0; i < grid.n; ++i) {
    const double x = grid.x(i);
    if (x <= Lp) {
      const double pos = x / profile.grid.dx;
      const Eigen::Index j = std::min<Eigen::Index>(Eigen::Index(pos), profile.grid.n - 2);
      const double t = pos - double(j);
      out[i] = (1.0 - t) * profile.vs[j] + t * profile.vs[j + 1];
    } else if (profile.decay.exponential) {
      out[i] = v_end * std::exp(-profile.decay.rate * (x - Lp));
    } else {
      out[i] = v_end * std::pow(x / Lp, -profile.decay.exponent);
    }
  }
  return out;
}

namespace {

enum class ShotClass { Overshoot, Undershoot };

struct ShotTrace {
  std::vector<double> xi;
  std::vector<double> u;
};

ShotClass shoot(const Nonlinearity& n, double c, double h, ShotTrace* trace) {
  const double fp1 = n.f_prime(1.0);
  if (!(fp1 < 0.0)) throw NumericError("front: u = 1 must be a saddle (f'(1) < 0)");
  const double m_plus = 0.5 * (-c + std::sqrt(c * c - 4.0 * fp1));
  const double eps = 1e-8;
  double u = 1.0 - eps;
  double w = -eps * m_plus;
  double xi = 0.0;
  const double xi_max = 4000.0;
  const double theta0 = n.theta0.value_or(-1.0);
  const bool ignition = (n.kind == NonlinKind::Ignition);

  auto rhs = [&n, c](double uu, double ww, double& du, double& dw) {
    du = ww;
    dw = -c * ww - n.f_clamped(std::max(uu, 0.0));
  };

  while (xi < xi_max) {
    if (trace) {
      trace->xi.push_back(xi);
      trace->u.push_back(u);
    }
    if (ignition && u <= theta0) {
      // Linear tail u'' + c u' = 0: the limit value decides the dichotomy.
      return (u + w / c > 0.0) ? ShotClass::Undershoot : ShotClass::Overshoot;
    }
    if (u <= 0.0) return ShotClass::Overshoot;
    if (w >= 0.0) return ShotClass::Undershoot;

    double k1u, k1w, k2u, k2w, k3u, k3w, k4u, k4w;
    rhs(u, w, k1u, k1w);
    rhs(u + 0.5 * h * k1u, w + 0.5 * h * k1w, k2u, k2w);
    rhs(u + 0.5 * h * k2u, w + 0.5 * h * k2w, k3u, k3w);
    rhs(u + h * k3u, w + h * k3w, k4u, k4w);
    u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    w += h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
    xi += h;
  }
  // Undecided within range: project onto the eigenbasis at the origin.
  const double fp0 = n.f_prime(0.0);
  const double lam_s = 0.5 * (-c - std::sqrt(std::max(c * c - 4.0 * fp0, 0.0)));
  return (w - lam_s * u > 0.0) ? ShotClass::Undershoot : ShotClass::Overshoot;
}

} // namespace

FrontProfile front(const Nonlinearity& n, std::pair<double, double> c_bracket) {
  if (n.kind == NonlinKind::Monostable) {
    throw ConfigError("front: pulled monostable fronts are out of scope");
  }
  double c_lo = c_bracket.first;
  double c_hi = c_bracket.second;
  if (!(c_lo > 0.0 && c_hi > c_lo)) throw ConfigError("front: bad speed bracket");

  const double h = 1e-3;
  if (shoot(n, c_lo, h, nullptr) != ShotClass::Overshoot ||
      shoot(n, c_hi, h, nullptr) != ShotClass::Undershoot) {
    throw NumericError("front: bracket does not straddle the dichotomy");
  }
  while (c_hi - c_lo >= 1e-8) {
    const double c_mid = 0.5 * (c_lo + c_hi);
    if (shoot(n, c_mid, h, nullptr) == ShotClass::Overshoot) {
      c_lo = c_mid;
    } else {
      c_hi = c_mid;
    }
  }
  const double c_dag = 0.5 * (c_lo + c_hi);

  ShotTrace trace;
  shoot(n, c_dag, h, &trace);
  // Extend the ignition tail analytically below theta0.
  if (n.kind == NonlinKind::Ignition && !trace.u.empty()) {
    double u_tail = trace.u.back();
    double xi_tail = trace.xi.back();
    while (u_tail > 1e-10 && trace.u.size() < 4'000'000) {
      xi_tail += h;
      u_tail *= std::exp(-c_dag * h);
      trace.xi.push_back(xi_tail);
      trace.u.push_back(u_tail);
    }
  }

  // Center so u crosses 1/2 at x = 0.
  double xi_half = 0.0;
  for (std::size_t i = 1; i < trace.u.size(); ++i) {
    if (trace.u[i] <= 0.5 && trace.u[i - 1] > 0.5) {
      const double t = (trace.u[i - 1] - 0.5) / (trace.u[i - 1] - trace.u[i]);
      xi_half = trace.xi[i - 1] + t * (trace.xi[i] - trace.xi[i - 1]);
      break;
    }
  }

  FrontProfile profile;
  profile.c_dagger = c_dag;
  const double dx_out = 1e-2;
  const Eigen::Index count =
      Eigen::Index((trace.xi.back() - trace.xi.front()) / dx_out) + 1;
  profile.xs.resize(count);
  profile.us.resize(count);
  std::size_t k = 0;
  double ceiling = 1.0;
  for (Eigen::Index i = 0; i < count; ++i) {
    const double xi = trace.xi.front() + dx_out * double(i);
    while (k + 1 < trace.xi.size() && trace.xi[k + 1] < xi) ++k;
    double u;
    if (k + 1 >= trace.xi.size()) {
      u = trace.u.back();
    } else {
      const double t = (xi - trace.xi[k]) / (trace.xi[k + 1] - trace.xi[k]);
      u = (1.0 - t) * trace.u[k] + t * trace.u[k + 1];
    }
    u = std::clamp(u, 0.0, ceiling);
    ceiling = u; // enforce monotone decrease
    profile.xs[i] = xi - xi_half;
    profile.us[i] = u;
  }
  return profile;
}

Eigen::ArrayXd sample_front(const FrontProfile& profile, double x_lo, double dx,
                            Eigen::Index count) {
  Eigen::ArrayXd out(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    const double x = x_lo + dx * double(i);
    if (x <= profile.xs[0]) {
      out[i] = 1.0;
    } else if (x >= profile.xs[profile.xs.size() - 1]) {
      out[i] = 0.0;
    } else {
      const double pos = (x - profile.xs[0]) / (profile.xs[1] - profile.xs[0]);
      const Eigen::Index j = std::min<Eigen::Index>(Eigen::Index(pos), profile.xs.size() - 2);
      const double t = pos - double(j);
      out[i] = (1.0 - t) * profile.us[j] + t * profile.us[j + 1];
    }
  }
  return out;
}

SpectralReport spectral_check(const BumpProfile& profile, const Nonlinearity& n, double L) {
  const double dx = profile.grid.dx;
  if (profile.grid.length() < L - 1e-9) {
    throw ConfigError("spectral_check: bump profile does not reach x = L");
  }
  const double v_at_L = profile.vs[Eigen::Index(std::lround(L / dx))];
  if (!(v_at_L < 1e-3)) {
    throw ConfigError("spectral_check: L too small (the bump tail must be negligible at L)");
  }
  const Eigen::Index half = Eigen::Index(std::lround(L / dx));
  const Eigen::Index m = 2 * half + 1; // nodes on [-L, L]
  Eigen::ArrayXd v_line(m), pot(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index j = (i >= half) ? (i - half) : (half - i);
    v_line[i] = profile.vs[j];
    pot[i] = -n.f_prime(v_line[i]);
  }

  const Eigen::Index mi = m - 2; // interior unknowns
  auto apply_T = [&](const Eigen::ArrayXd& z) {
    Eigen::ArrayXd out(mi);
    for (Eigen::Index i = 0; i < mi; ++i) {
      const double left = (i > 0) ? z[i - 1] : 0.0;
      const double right = (i + 1 < mi) ? z[i + 1] : 0.0;
      out[i] = (2.0 * z[i] - left - right) / (dx * dx) + pot[i + 1] * z[i];
    }
    return out;
  };
  auto rayleigh = [&](const Eigen::ArrayXd& z) {
    const Eigen::ArrayXd Tz = apply_T(z);
    return (z * Tz).sum() / (z * z).sum();
  };

  const double shift = pot.minCoeff() - 1.0; // strictly below the spectrum
  Eigen::ArrayXd z(mi);
  for (Eigen::Index i = 0; i < mi; ++i) {
    const double x = -L + dx * double(i + 1);
    z[i] = 1.0 - (x / L) * (x / L);
  }
  double lambda = rayleigh(z);
  for (int iter = 0; iter < 500; ++iter) {
    Eigen::ArrayXd sub = Eigen::ArrayXd::Constant(mi - 1, -1.0 / (dx * dx));
    Eigen::ArrayXd sup = sub;
    Eigen::ArrayXd diag(mi);
    for (Eigen::Index i = 0; i < mi; ++i) diag[i] = 2.0 / (dx * dx) + pot[i + 1] - shift;
    Eigen::ArrayXd rhs = z;
    numerics::solve_tridiagonal(sub, diag, sup, rhs);
    rhs /= std::sqrt((rhs * rhs).sum());
    const double next = rayleigh(rhs);
    z = rhs;
    if (std::abs(next - lambda) < 1e-13 * std::max(1.0, std::abs(next))) {
      lambda = next;
      break;
    }
    lambda = next;
  }

  SpectralReport report;
  report.nu0_L = lambda;
  if (z[mi / 2] < 0.0) z = -z;
  report.eigenfunction.x0 = -L;
  report.eigenfunction.dx = dx;
  report.eigenfunction.values = Eigen::ArrayXd::Zero(m);
  report.eigenfunction.values.segment(1, mi) = z;

  // Translational mode: the Rayleigh quotient at the discrete v'.
  Eigen::ArrayXd vp(mi);
  for (Eigen::Index i = 0; i < mi; ++i) {
    vp[i] = (v_line[i + 2] - v_line[i]) / (2.0 * dx);
  }
  report.rayleigh_at_vprime = rayleigh(vp);
  return report;
}

void write_bump_csv(const std::string& path, const BumpProfile& profile) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << "# theta_star = " << numerics::fmt_g17(profile.theta_star) << "\n";
  out << "# E0 = " << numerics::fmt_g17(profile.E0) << "\n";
  if (profile.decay.exponential) {
    out << "# decay = exponential mu=" << numerics::fmt_g17(profile.decay.rate) << "\n";
  } else {
    out << "# decay = algebraic exponent=" << numerics::fmt_g17(profile.decay.exponent) << "\n";
  }
  out << "x,v\n";
  for (Eigen::Index i = 0; i < profile.grid.n; ++i) {
    out << numerics::fmt_g17(profile.grid.x(i)) << ',' << numerics::fmt_g17(profile.vs[i])
        << '\n';
  }
}

void write_front_csv(const std::string& path, const FrontProfile& profile) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << "# c_dagger = " << numerics::fmt_g17(profile.c_dagger) << "\n";
  out << "x,u\n";
  for (Eigen::Index i = 0; i < profile.xs.size(); ++i) {
    out << numerics::fmt_g17(profile.xs[i]) << ',' << numerics::fmt_g17(profile.us[i]) << '\n';
  }
}

} // namespace rdlab
