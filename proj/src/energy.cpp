#include "rdlab/energy.hpp"

#include <cmath>

#include "rdlab/evolve.hpp"
#include "rdlab/io.hpp"
#include "rdlab/numerics.hpp"

namespace rdlab {

namespace {

constexpr double kOverflowGuard = 600.0;

double half_line_ux(const Eigen::ArrayXd& v, Eigen::Index i, double dx) {
  const Eigen::Index m = v.size();
  if (i == 0) return 0.0; // symmetry axis
  if (i == m - 1) return (v[m - 1] - v[m - 2]) / dx;
  return (v[i + 1] - v[i - 1]) / (2.0 * dx);
}

double line_ux(const Eigen::ArrayXd& v, Eigen::Index i, double dx) {
  const Eigen::Index m = v.size();
  if (i == 0) return (v[1] - v[0]) / dx;
  if (i == m - 1) return (v[m - 1] - v[m - 2]) / dx;
  return (v[i + 1] - v[i - 1]) / (2.0 * dx);
}

} // namespace

std::vector<double> default_c_grid(double c_dagger_estimate) {
  const double lo = 0.01;
  const double hi = std::max(2.0 * c_dagger_estimate, 2.0 * lo);
  std::vector<double> grid(16);
  for (int i = 0; i < 16; ++i) {
    grid[i] = lo * std::pow(hi / lo, double(i) / 15.0);
  }
  return grid;
}

double energy(const Field& field, const Nonlinearity& n) {
  const auto& v = field.values;
  const double dx = field.grid.dx;
  long double acc = 0.0L;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double ux = half_line_ux(v, i, dx);
    const double g = 0.5 * ux * ux + n.V(v[i]);
    const double trap = (i == 0 || i == v.size() - 1) ? 0.5 : 1.0;
    acc += (long double)(trap * g);
  }
  return double(2.0L * acc * (long double)dx);
}

double energy(const LineField& lf, const Nonlinearity& n) {
  const auto& v = lf.values;
  long double acc = 0.0L;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double ux = line_ux(v, i, lf.dx);
    const double g = 0.5 * ux * ux + n.V(v[i]);
    const double trap = (i == 0 || i == v.size() - 1) ? 0.5 : 1.0;
    acc += (long double)(trap * g);
  }
  return double(acc * (long double)lf.dx);
}

namespace {

struct PhiOutcome {
  double value = 0.0;
  bool in_class = true;
};

PhiOutcome phi_c_field(const Field& field, const Nonlinearity& n, double c) {
  const auto& v = field.values;
  const double dx = field.grid.dx;
  const double L = field.grid.length();
  PhiOutcome out;
  if (c * L > kOverflowGuard) {
    out.in_class = false;
    return out;
  }
  long double acc = 0.0L;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double ux = half_line_ux(v, i, dx);
    const double g = 0.5 * ux * ux + n.V(v[i]);
    const double trap = (i == 0 || i == v.size() - 1) ? 0.5 : 1.0;
    acc += (long double)(trap * 2.0 * std::cosh(c * field.grid.x(i)) * g);
  }
  out.value = double(acc * (long double)dx);
  const double ux_end = half_line_ux(v, v.size() - 1, dx);
  const double tail = std::exp(c * L) * (0.5 * ux_end * ux_end + std::abs(n.V(v[v.size() - 1])));
  out.in_class = tail <= std::max(1e-8, 1e-6 * std::abs(out.value));
  return out;
}

PhiOutcome phi_c_line(const LineField& lf, const Nonlinearity& n, double c) {
  const auto& v = lf.values;
  PhiOutcome out;
  const double x_hi = lf.x(lf.n() - 1);
  if (c * std::max(std::abs(x_hi), std::abs(lf.x0)) > kOverflowGuard) {
    out.in_class = false;
    return out;
  }
  long double acc = 0.0L;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double ux = line_ux(v, i, lf.dx);
    const double g = 0.5 * ux * ux + n.V(v[i]);
    const double trap = (i == 0 || i == v.size() - 1) ? 0.5 : 1.0;
    acc += (long double)(trap * std::exp(c * lf.x(i)) * g);
  }
  out.value = double(acc * (long double)lf.dx);
  const double uxr = line_ux(v, v.size() - 1, lf.dx);
  const double tail = std::exp(c * x_hi) * (0.5 * uxr * uxr + std::abs(n.V(v[v.size() - 1])));
  out.in_class = tail <= std::max(1e-8, 1e-6 * std::abs(out.value));
  return out;
}

} // namespace

double phi_c(const Field& field, const Nonlinearity& n, double c) {
  if (!(c > 0.0)) throw ConfigError("phi_c: c must be positive");
  const auto out = phi_c_field(field, n, c);
  if (!out.in_class) {
    throw NumericError("phi_c: field fails the weighted-class guard at this c");
  }
  return out.value;
}

double phi_c(const LineField& lf, const Nonlinearity& n, double c) {
  if (!(c > 0.0)) throw ConfigError("phi_c: c must be positive");
  const auto out = phi_c_line(lf, n, c);
  if (!out.in_class) {
    throw NumericError("phi_c: field fails the weighted-class guard at this c");
  }
  return out.value;
}

std::optional<double> try_phi_c(const Field& field, const Nonlinearity& n, double c) {
  const auto out = phi_c_field(field, n, c);
  if (!out.in_class) return std::nullopt;
  return out.value;
}

std::optional<double> try_phi_c(const LineField& lf, const Nonlinearity& n, double c) {
  const auto out = phi_c_line(lf, n, c);
  if (!out.in_class) return std::nullopt;
  return out.value;
}

double dissipation_residual(const Trajectory& traj, const Nonlinearity&) {
  if (traj.energy_series.size() < 2) {
    throw ConfigError("dissipation_residual: trajectory needs an energy probe and >= 2 records");
  }
  double max_abs_E = 0.0;
  for (double e : traj.energy_series) max_abs_E = std::max(max_abs_E, std::abs(e));
  const double eps = 1e-9 * (1.0 + max_abs_E);
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < traj.energy_series.size(); ++k) {
    const double dE = traj.energy_series[k + 1] - traj.energy_series[k];
    const double h = traj.times[k + 1] - traj.times[k];
    const double w0 = traj.ut_l2_series[k], w1 = traj.ut_l2_series[k + 1];
    const double integral = 0.5 * h * (w0 * w0 + w1 * w1);
    worst = std::max(worst, std::abs(dE + integral) / (std::abs(dE) + eps));
  }
  return worst;
}

double dissipation_residual_weighted(const MovingTrajectory& traj, const Nonlinearity&,
                                     double c) {
  auto it = traj.phi_series.find(c);
  auto wt = traj.ut_l2c_series.find(c);
  if (it == traj.phi_series.end() || wt == traj.ut_l2c_series.end() || it->second.size() < 2) {
    throw ConfigError("dissipation_residual_weighted: missing probe series for this c");
  }
  const auto& phi = it->second;
  const auto& w = wt->second;
  double max_abs = 0.0;
  for (double p : phi) {
    if (std::isfinite(p)) max_abs = std::max(max_abs, std::abs(p));
  }
  const double eps = 1e-9 * (1.0 + max_abs);
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < phi.size(); ++k) {
    if (!std::isfinite(phi[k]) || !std::isfinite(phi[k + 1])) continue;
    const double dP = phi[k + 1] - phi[k];
    const double h = traj.times[k + 1] - traj.times[k];
    const double integral = 0.5 * h * (w[k] * w[k] + w[k + 1] * w[k + 1]);
    worst = std::max(worst, std::abs(dP + integral) / (std::abs(dP) + eps));
  }
  return worst;
}

std::optional<WaveLikeCertificate> is_wave_like(const Trajectory& traj, const Nonlinearity& n,
                                                const std::vector<double>& c_grid) {
  if (traj.snapshots.empty()) {
    throw ConfigError("is_wave_like: trajectory was recorded without snapshots");
  }
  for (std::size_t i = 1; i < c_grid.size(); ++i) {
    if (!(c_grid[i] > c_grid[i - 1]) || !(c_grid[i - 1] > 0.0)) {
      throw ConfigError("is_wave_like: c_grid must be positive ascending");
    }
  }
  const Field& phi0 = traj.snapshots.front();
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    for (double c : c_grid) {
      // The initial datum must itself belong to L^2_c.
      const double tail0 =
          std::exp(c * phi0.grid.length()) * phi0.far_value() * phi0.far_value();
      if (tail0 > 1e-9) continue;
      const auto value = try_phi_c(traj.snapshots[k], n, c);
      if (value && *value < 0.0) {
        WaveLikeCertificate cert;
        cert.c = c;
        cert.time = traj.times[k];
        cert.phi_value = *value;
        cert.delta0 = largest_delta0(n, c);
        return cert;
      }
    }
  }
  return std::nullopt;
}

double largest_delta0(const Nonlinearity& n, double c, int samples) {
  const double hi = n.clip_ceiling();
  auto slack = [&](double u) { return n.V(u) + 0.125 * c * c * u * u; };
  double delta0 = 0.0;
  for (int i = 1; i <= samples; ++i) {
    const double u = hi * double(i) / double(samples);
    if (slack(u) < 0.0) {
      // Sharpen within the violating panel.
      double lo = delta0, up = u;
      for (int k = 0; k < 60; ++k) {
        const double mid = 0.5 * (lo + up);
        (slack(mid) >= 0.0 ? lo : up) = mid;
      }
      return lo;
    }
    delta0 = u;
  }
  return delta0;
}

double holder_constant(const Trajectory& traj, double T, double floor) {
  if (traj.energy_series.size() < 2) {
    throw ConfigError("holder_constant: trajectory needs an energy probe and >= 2 records");
  }
  double min_E = traj.energy_series[0];
  for (double e : traj.energy_series) min_E = std::min(min_E, e);
  if (min_E < floor) {
    throw NumericError("holder_constant: energy unbounded below; the estimate does not apply");
  }
  std::size_t idx = traj.energy_series.size() - 1;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    if (traj.times[i] >= T - 1e-12) {
      idx = i;
      break;
    }
  }
  const double gap = std::max(0.0, traj.energy_series[idx] - traj.energy_series.back());
  const double M = std::max(traj.m_bound, 1e-300);
  return 2.0 * std::sqrt(M) * std::pow(gap, 0.25);
}

EnergyReport make_energy_report(const Trajectory& traj, const Nonlinearity& n) {
  EnergyReport report;
  for (std::size_t i = 0; i < traj.energy_series.size(); ++i) {
    report.E_series.emplace_back(traj.times[i], traj.energy_series[i]);
  }
  for (const auto& [c, series] : traj.phi_series) {
    report.c_list.push_back(c);
    report.phi_series.push_back(series);
  }
  if (traj.energy_series.size() >= 2) {
    report.dissipation_residual = dissipation_residual(traj, n);
    report.E_inf_estimate = traj.energy_series.back();
    const double T = traj.times[traj.times.size() / 2];
    try {
      report.holder_constant = holder_constant(traj, T);
    } catch (const NumericError&) {
      report.holder_constant = std::nan(""); // estimate inapplicable
    }
  }
  return report;
}

void write_energy_csv(const std::string& path, const EnergyReport& report) {
  std::vector<std::string> cols = {"t", "E"};
  for (double c : report.c_list) cols.push_back("phi_c=" + numerics::fmt_g17(c));
  cols.push_back("residual");
  CsvWriter csv(path, cols);
  for (std::size_t i = 0; i < report.E_series.size(); ++i) {
    std::vector<double> row = {report.E_series[i].first, report.E_series[i].second};
    for (const auto& series : report.phi_series) {
      row.push_back(i < series.size() ? series[i] : std::nan(""));
    }
    row.push_back(report.dissipation_residual);
    csv.row(row);
  }
  csv.close();
}

} // namespace rdlab
