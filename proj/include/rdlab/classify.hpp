#pragma once

#include <map>
#include <optional>
#include <string>

#include "rdlab/energy.hpp"
#include "rdlab/evolve.hpp"
#include "rdlab/stationary.hpp"

#include <json.hpp>

namespace rdlab {

enum class BehaviorLabel { Propagation, BumpConvergence, ThetaZeroConvergence, Extinction, Undecided };

std::string to_string(BehaviorLabel label);
BehaviorLabel behavior_from_string(const std::string& s);

struct Verdict {
  BehaviorLabel label = BehaviorLabel::Undecided;
  std::string trigger;   // decision rule that fired
  double time = 0.0;     // record instant of the trigger
  std::map<std::string, double> margins;
  double energy_at_stop = 0.0;
  bool heuristic = false; // monostable extinction window rule is a heuristic

  nlohmann::json to_json() const;
};

struct ClassifyOptions {
  double eps_u = 1e-6;    // barrier margin below theta0
  double eps_ext = 1e-4;  // monostable smallness threshold for u(0,t)
  double tol_bump = 0.02; // uniform distance to the bump
  double tol_E = 1e-2;    // |E - E0| for bump convergence
  double tol_theta = 0.02;
  int dwell = 50;         // records held before convergence labels

  // Supercritical monostable (f <= u^p, p > 3): extinction is certified once
  // (p-1)^2/(p-3) * m^2 s^{p-3} / (4 pi) drops below this margin, where m is
  // the mass and s the sup of the profile. A heat-flow majorant then decays
  // uniformly. Set to 0 to disable.
  double supercritical_margin = 0.5;

  // After a verdict fires the run keeps integrating until the energy
  // matches its class, so terminal crosschecks see a settled value.
  bool polish_energy = true;
  double propagation_certificate = -1.5; // continue until E below this
  double zero_certificate = 5e-4;        // ... or |E| below this
};

struct ClassifierRefs {
  const BumpProfile* bump = nullptr; // enables the BumpConvergence rule
};

/// Stateful decision procedure, invoked once per record instant.
class Classifier {
public:
  Classifier(const Nonlinearity& n, ClassifyOptions opts, ClassifierRefs refs = {});

  /// Verdict once a rule fires; nullopt means continue.
  std::optional<Verdict> observe(const Trajectory& traj);

  /// Uniform distance to the bump at the latest record (needs refs.bump).
  double bump_distance(const Trajectory& traj);

private:
  const Nonlinearity& n_;
  ClassifyOptions opts_;
  ClassifierRefs refs_;
  int bump_dwell_ = 0;
  int theta_dwell_ = 0;
  Eigen::ArrayXd bump_cache_;
  Eigen::Index bump_cache_n_ = -1;
};

struct ClassifiedRun {
  Trajectory traj;
  Verdict verdict;
};

/// run() driven by a Classifier; Undecided at t_max is an explicit outcome.
ClassifiedRun run_classified(const Field& phi, const Nonlinearity& n, const SolverConfig& cfg,
                             const EnergyProbe& probe, const ClassifyOptions& opts,
                             const ClassifierRefs& refs = {});

/// Least-squares slope of R_delta(t) over the trailing half of the run.
/// Throws NumericError with fewer than 10 finite leading-edge records.
double edge_speed(const Trajectory& traj, double delta);

struct ConsistencyReport {
  bool ok = false;
  std::string expected; // the energy limit the label requires
  double value = 0.0;   // terminal energy (or |E - E0|)
  double threshold = 0.0;
  double margin = 0.0;  // threshold - value (positive = pass)
};

/// Asserts the energy-behavior correspondence on a terminal verdict.
/// BumpConvergence requires E0.
ConsistencyReport crosscheck(const Verdict& verdict, const EnergyReport& report,
                             const Nonlinearity& n, std::optional<double> E0 = std::nullopt);

} // namespace rdlab
