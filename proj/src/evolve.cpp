#include "rdlab/evolve.hpp"

#include <cmath>

#include "rdlab/io.hpp"
#include "rdlab/numerics.hpp"

namespace rdlab {

namespace {

double implicit_weight(Scheme s) { return s == Scheme::CrankNicolson ? 0.5 : 1.0; }
double explicit_weight(Scheme s) { return s == Scheme::CrankNicolson ? 0.5 : 0.0; }

/// L2 norm over the reflected line of a nodal array on the half-line.
double l2_norm_symmetric(const Eigen::ArrayXd& w, double dx) {
  if (w.size() < 2) return 0.0;
  long double acc = 0.5L * w[0] * w[0];
  for (Eigen::Index i = 1; i + 1 < w.size(); ++i) acc += (long double)(w[i] * w[i]);
  acc += 0.5L * w[w.size() - 1] * w[w.size() - 1];
  return std::sqrt(double(2.0L * acc * (long double)dx));
}

double sup_abs_derivative(const Eigen::ArrayXd& v, double dx) {
  double m = 0.0;
  for (Eigen::Index i = 0; i + 1 < v.size(); ++i) {
    m = std::max(m, std::abs(v[i + 1] - v[i]) / dx);
  }
  return m;
}

void check_blowup(double value, const Nonlinearity& n, const SolverConfig& cfg) {
  if (!(value <= cfg.blowup_factor * n.u_max)) {
    throw NumericError("blow-up guard: |u| exceeded " + std::to_string(cfg.blowup_factor) +
                       " * u_max; the universal supersolution bound rules this out for a "
                       "well-posed configuration");
  }
}

} // namespace

std::string to_string(Scheme s) {
  return s == Scheme::CrankNicolson ? "cn" : "be";
}

Scheme scheme_from_string(const std::string& s) {
  if (s == "cn" || s == "crank-nicolson") return Scheme::CrankNicolson;
  if (s == "be" || s == "backward-euler") return Scheme::BackwardEuler;
  throw ConfigError("unknown scheme '" + s + "' (expected cn or be)");
}

Field step(const Field& field, const Nonlinearity& n, const SolverConfig& cfg) {
  const Eigen::Index m = field.grid.n;
  const double dx = field.grid.dx;
  const double dt = cfg.dt;
  const double r = dt / (dx * dx);
  const double ti = implicit_weight(cfg.scheme);
  const double te = explicit_weight(cfg.scheme);

  check_blowup(field.max(), n, cfg);

  const auto& u = field.values;
  Eigen::ArrayXd rhs(m), diag(m), sub(m - 1), sup(m - 1);

  // Neumann row at the axis: ghost value u_{-1} = u_1.
  rhs[0] = u[0] + te * 2.0 * r * (u[1] - u[0]) + dt * n.f_clamped(u[0]);
  diag[0] = 1.0 + ti * 2.0 * r;
  sup[0] = -ti * 2.0 * r;
  for (Eigen::Index i = 1; i + 1 < m; ++i) {
    rhs[i] = u[i] + te * r * (u[i - 1] - 2.0 * u[i] + u[i + 1]) + dt * n.f_clamped(u[i]);
    diag[i] = 1.0 + 2.0 * ti * r;
    sub[i - 1] = -ti * r;
    sup[i] = -ti * r;
  }
  // Homogeneous Dirichlet at x = L.
  rhs[m - 1] = 0.0;
  diag[m - 1] = 1.0;
  sub[m - 2] = 0.0;

  numerics::solve_tridiagonal(sub, diag, sup, rhs);

  Field out(field.grid, std::move(rhs));
  check_blowup(out.values.maxCoeff(), n, cfg);
  repair_symmetric_decreasing(out);
  return out;
}

LineField step_moving_frame(const LineField& lf, const Nonlinearity& n, double c,
                            const SolverConfig& cfg) {
  if (c < 0.0) throw ConfigError("step_moving_frame: c must be >= 0");
  const Eigen::Index m = lf.n();
  const double dx = lf.dx;
  const double dt = cfg.dt;
  if (c * dt / dx > 1.0) {
    throw NumericError("step_moving_frame: c*dt/dx exceeds the advection quality guard");
  }
  const double r = dt / (dx * dx);
  const double q = c * dt / (2.0 * dx);
  const double ti = implicit_weight(cfg.scheme);
  const double te = explicit_weight(cfg.scheme);

  check_blowup(lf.values.abs().maxCoeff(), n, cfg);

  const auto& u = lf.values;
  Eigen::ArrayXd rhs(m), diag(m), sub(m - 1), sup(m - 1);

  // End values held fixed.
  rhs[0] = u[0];
  diag[0] = 1.0;
  sup[0] = 0.0;
  rhs[m - 1] = u[m - 1];
  diag[m - 1] = 1.0;
  sub[m - 2] = 0.0;
  for (Eigen::Index i = 1; i + 1 < m; ++i) {
    const double lap = r * (u[i - 1] - 2.0 * u[i] + u[i + 1]);
    const double adv = q * (u[i + 1] - u[i - 1]);
    rhs[i] = u[i] + te * (lap + adv) + dt * n.f_clamped(u[i]);
    diag[i] = 1.0 + 2.0 * ti * r;
    sub[i - 1] = -ti * (r - q);
    sup[i] = -ti * (r + q);
  }

  numerics::solve_tridiagonal(sub, diag, sup, rhs);

  LineField out;
  out.x0 = lf.x0;
  out.dx = dx;
  out.values = rhs.max(0.0);
  check_blowup(out.values.maxCoeff(), n, cfg);
  return out;
}

namespace {

void record_instant(Trajectory& traj, const Field& u, const Field& u_prev, double t, double dt,
                    bool first, const Nonlinearity& n, const EnergyProbe& probe,
                    const SolverConfig& cfg) {
  traj.times.push_back(t);
  traj.u0_series.push_back(u.at_origin());
  traj.r_delta_series.push_back(leading_edge(u, cfg.edge_delta));
  if (first) {
    traj.ut_l2_series.push_back(0.0); // backfilled after the first step
  } else {
    Eigen::ArrayXd diff = (u.values - u_prev.values) / dt;
    traj.ut_l2_series.push_back(l2_norm_symmetric(diff, u.grid.dx));
  }
  if (probe.wants_E) traj.energy_series.push_back(energy(u, n));
  for (double c : probe.c_list) {
    auto value = try_phi_c(u, n, c);
    traj.phi_series[c].push_back(value.value_or(std::nan("")));
  }
  if (t >= 1.0) {
    traj.m_bound = std::max({traj.m_bound, u.max(), sup_abs_derivative(u.values, u.grid.dx)});
  }
  if (cfg.keep_snapshots) traj.snapshots.push_back(u);
  traj.state = u;
}

} // namespace

Trajectory run(const Field& phi, const Nonlinearity& n, const SolverConfig& cfg,
               const EnergyProbe& probe, const RecordCallback& stop) {
  if (!(cfg.dt > 0.0)) throw ConfigError("run: dt must be positive");
  if (!(cfg.expand_trigger > 0.0 && cfg.expand_trigger < 1.0)) {
    throw ConfigError("run: expand_trigger must lie in (0,1)");
  }

  Field u = phi;
  repair_symmetric_decreasing(u);

  Trajectory traj;
  traj.edge_delta = cfg.edge_delta;
  traj.truncation_warning = u.far_value() > cfg.far_tol;

  Field u_prev = u;
  record_instant(traj, u, u_prev, 0.0, cfg.dt, true, n, probe, cfg);
  if (stop && stop(traj)) {
    traj.stopped_early = true;
    return traj;
  }

  const long total_steps = long(std::ceil(cfg.t_max / cfg.dt - 1e-12));
  for (long k = 1; k <= total_steps; ++k) {
    u_prev = u;
    u = step(u, n, cfg);
    if (k == 1) {
      Eigen::ArrayXd diff = (u.values - u_prev.values) / cfg.dt;
      traj.ut_l2_series[0] = l2_norm_symmetric(diff, u.grid.dx);
    }
    const bool at_record = (k % cfg.record_every == 0) || (k == total_steps);
    if (!at_record) continue;

    const double t = cfg.dt * double(k);
    record_instant(traj, u, u_prev, t, cfg.dt, false, n, probe, cfg);

    // Domain expansion: zero-padding preserves (SD) and the data class.
    const double edge = traj.r_delta_series.back();
    if (std::isfinite(edge) && edge > cfg.expand_trigger * u.grid.length()) {
      const Grid larger = Grid::from_length(u.grid.dx, u.grid.length() * cfg.expand_factor);
      u = expand_to(u, larger);
      traj.state = u;
      if (cfg.keep_snapshots && !traj.snapshots.empty()) traj.snapshots.back() = u;
    }

    if (stop && stop(traj)) {
      traj.stopped_early = true;
      break;
    }
  }
  return traj;
}

MovingTrajectory run_moving_frame(const LineField& phi, const Nonlinearity& n, double c,
                                  const SolverConfig& cfg, const std::vector<double>& c_probes) {
  MovingTrajectory traj;
  LineField u = phi;

  auto record = [&](const LineField& cur, const LineField& prev, double t, bool first) {
    traj.times.push_back(t);
    for (double cw : c_probes) {
      auto value = try_phi_c(cur, n, cw);
      traj.phi_series[cw].push_back(value.value_or(std::nan("")));
      if (first) {
        traj.ut_l2c_series[cw].push_back(0.0);
      } else {
        long double acc = 0.0L;
        for (Eigen::Index i = 0; i < cur.n(); ++i) {
          const double w = std::exp(cw * cur.x(i));
          const double ut = (cur.values[i] - prev.values[i]) / cfg.dt;
          const double trap = (i == 0 || i == cur.n() - 1) ? 0.5 : 1.0;
          acc += (long double)(trap * w * ut * ut);
        }
        traj.ut_l2c_series[cw].push_back(std::sqrt(double(acc * (long double)cur.dx)));
      }
    }
    traj.snapshots.push_back(cur);
    traj.state = cur;
  };

  LineField u_prev = u;
  record(u, u_prev, 0.0, true);
  const long total_steps = long(std::ceil(cfg.t_max / cfg.dt - 1e-12));
  for (long k = 1; k <= total_steps; ++k) {
    u_prev = u;
    u = step_moving_frame(u, n, c, cfg);
    if (k == 1) {
      // Backfill the weighted u_t at t=0 with the first step's value.
      for (double cw : c_probes) {
        long double acc = 0.0L;
        for (Eigen::Index i = 0; i < u.n(); ++i) {
          const double w = std::exp(cw * u.x(i));
          const double ut = (u.values[i] - u_prev.values[i]) / cfg.dt;
          const double trap = (i == 0 || i == u.n() - 1) ? 0.5 : 1.0;
          acc += (long double)(trap * w * ut * ut);
        }
        traj.ut_l2c_series[cw][0] = std::sqrt(double(acc * (long double)u.dx));
      }
    }
    if ((k % cfg.record_every == 0) || (k == total_steps)) {
      record(u, u_prev, cfg.dt * double(k), false);
    }
  }
  return traj;
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  std::vector<std::string> cols = {"t", "u0"};
  if (!traj.energy_series.empty()) cols.push_back("E");
  for (const auto& [c, series] : traj.phi_series) {
    cols.push_back("phi_c=" + numerics::fmt_g17(c));
  }
  cols.push_back("R_delta");
  cols.push_back("ut_l2");
  CsvWriter csv(path, cols);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    std::vector<double> row = {traj.times[i], traj.u0_series[i]};
    if (!traj.energy_series.empty()) row.push_back(traj.energy_series[i]);
    for (const auto& [c, series] : traj.phi_series) row.push_back(series[i]);
    row.push_back(traj.r_delta_series[i]);
    row.push_back(traj.ut_l2_series[i]);
    csv.row(row);
  }
  csv.close();
}

} // namespace rdlab
