#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "rdlab/energy.hpp"
#include "rdlab/field.hpp"
#include "rdlab/nonlin.hpp"

namespace rdlab {

enum class Scheme { CrankNicolson, BackwardEuler };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

struct SolverConfig {
  double dt = 1e-3;
  Scheme scheme = Scheme::CrankNicolson;
  double t_max = 100.0;
  double expand_trigger = 0.8; // expand when R_delta > trigger * L
  double expand_factor = 2.0;
  double edge_delta = 0.05;    // delta used for expansion checks and R_delta
  int record_every = 50;       // steps between records
  bool keep_snapshots = true;
  double far_tol = 1e-5;       // truncation-validity monitor on u(L, 0)
  double blowup_factor = 2.0;  // guard fires at blowup_factor * u_max
};

/// Recorded history of a run. Fields with one entry per record instant.
struct Trajectory {
  std::vector<double> times;
  std::vector<Field> snapshots; // empty unless cfg.keep_snapshots
  Field state;                  // most recent recorded field (always kept)
  std::vector<double> u0_series;
  std::vector<double> ut_l2_series; // ||u_t||_{L^2} via one-step differences
  std::vector<double> r_delta_series;
  std::vector<double> energy_series;            // present when probe.wants_E
  std::map<double, std::vector<double>> phi_series; // c -> Phi_c series
  double m_bound = 0.0;     // sup of |u|, |u_x| over records with t >= 1
  double edge_delta = 0.0;  // the delta used for r_delta_series
  bool stopped_early = false;
  bool truncation_warning = false;

  std::size_t size() const { return times.size(); }
};

/// One IMEX step of u_t = u_xx + f(u) on the half line: implicit diffusion
/// (Neumann row at the axis, homogeneous Dirichlet at x = L), explicit
/// reaction, result repaired to (SD). Throws NumericError past the blow-up
/// guard.
Field step(const Field& field, const Nonlinearity& n, const SolverConfig& cfg);

/// IMEX step of u_t = u_xx + c u_x + f(u) on a full line, advection folded
/// into the implicit tridiagonal matrix. End values are held fixed
/// (Dirichlet at both ends). Guards on c dt / dx quality.
LineField step_moving_frame(const LineField& lf, const Nonlinearity& n, double c,
                            const SolverConfig& cfg);

/// Called at each record instant; return true to stop the run.
using RecordCallback = std::function<bool(const Trajectory&)>;

/// Integrates to t_max or until the callback stops the run. The domain is
/// zero-padded by cfg.expand_factor whenever the leading edge passes
/// cfg.expand_trigger * L.
Trajectory run(const Field& phi, const Nonlinearity& n, const SolverConfig& cfg,
               const EnergyProbe& probe = {}, const RecordCallback& stop = {});

/// Moving-frame analogue of Trajectory, with weighted diagnostics.
struct MovingTrajectory {
  std::vector<double> times;
  std::vector<LineField> snapshots;
  LineField state;
  std::map<double, std::vector<double>> phi_series;      // c -> Phi_c
  std::map<double, std::vector<double>> ut_l2c_series;   // c -> weighted ||u_t||
  std::size_t size() const { return times.size(); }
};

MovingTrajectory run_moving_frame(const LineField& phi, const Nonlinearity& n, double c,
                                  const SolverConfig& cfg, const std::vector<double>& c_probes);

/// Trajectory CSV: t, u0, E, Phi columns, R_delta, ut_l2.
void write_trajectory_csv(const std::string& path, const Trajectory& traj);

} // namespace rdlab
