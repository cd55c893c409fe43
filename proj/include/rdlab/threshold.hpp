#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "rdlab/classify.hpp"

#include <json.hpp>

namespace rdlab {

enum class FamilyKind { RectWidth, RectHeight, GaussianAmplitude, BumpScale };

std::string to_string(FamilyKind kind);
FamilyKind family_kind_from_string(const std::string& s);

/// Monotone family of symmetric decreasing initial data: lambda -> phi_lambda
/// nondecreasing nodewise with phi_lambda -> 0 in L^2 as lambda -> 0.
/// Characteristic functions are mollified over 2 dx so the family lives on
/// the grid.
struct Family {
  FamilyKind kind = FamilyKind::RectWidth;
  double height = 1.0; // RectWidth
  double width = 1.0;  // RectHeight
  double sigma = 1.0;  // GaussianAmplitude
  std::shared_ptr<const BumpProfile> bump; // BumpScale
  double lambda_max = 100.0;

  Field materialize(double lambda, const Grid& grid) const;
  double amplitude(double lambda) const;   // sup phi_lambda
  double halfwidth(double lambda) const;   // support / decay scale, for grid sizing
};

/// Validates monotonicity, the L^2 -> 0 limit and the amplitude cap against
/// the nonlinearity's clipping ceiling. Throws ConfigError on violations.
Family make_family(FamilyKind kind, double param, double lambda_max, const Nonlinearity& n,
                   std::shared_ptr<const BumpProfile> bump = nullptr);

struct SweepRecord {
  double lambda = 0.0;
  BehaviorLabel label = BehaviorLabel::Undecided;
  double stop_time = 0.0;
  double energy = 0.0;
  double t_max_used = 0.0;
};

enum class TrichotomyLabel { AllExtinct, SharpThreshold, AllPropagate };

std::string to_string(TrichotomyLabel label);

struct ThresholdResult {
  TrichotomyLabel trichotomy = TrichotomyLabel::SharpThreshold;
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  BehaviorLabel verdict_lo = BehaviorLabel::Undecided;
  BehaviorLabel verdict_hi = BehaviorLabel::Undecided;
  bool undecided_flag = false; // bracket returned early around a stalled midpoint
  std::vector<SweepRecord> runs;

  double lambda_mid() const { return 0.5 * (lambda_lo + lambda_hi); }
  nlohmann::json to_json() const;
};

struct ThresholdConfig {
  double tol_lambda = 1e-3;
  double lambda_max = 100.0;
  double lambda_init = 1.0;
  double t_cap_factor = 16.0;    // Undecided midpoints double t_max up to this
  double lambda_small_cap = 1e-4; // hair-trigger probes below this => AllPropagate
  int workers = 1;
};

/// Exponential search for one verdict of each kind, then bisection keeping
/// verdict(lambda_lo) = Extinction and verdict(lambda_hi) = Propagation.
ThresholdResult find_threshold(const Family& family, const Nonlinearity& n,
                               const Grid& base_grid, const SolverConfig& cfg,
                               const ClassifyOptions& copts, const ThresholdConfig& tcfg);

struct ThresholdEvidence {
  double min_bump_distance = std::numeric_limits<double>::infinity();
  double t_at_min_bump = 0.0;
  double min_theta_gap = std::numeric_limits<double>::infinity(); // min u(0,t) - theta0 over records with u(0) > theta0
  double theta_band_entry = -1.0; // first t with u(0) in [theta0, theta0 + tol]
  BehaviorLabel lo_verdict = BehaviorLabel::Undecided; // monostable: rerun at lambda_lo
  nlohmann::json to_json() const;
};

/// Long-horizon run at the bracket midpoint recording how the solution
/// approaches the threshold attractor (bump / theta0 plateau), or for
/// monostable kinds the verdict at lambda_lo.
ThresholdEvidence threshold_behavior(const ThresholdResult& result, const Family& family,
                                     const Nonlinearity& n, const Grid& base_grid,
                                     const SolverConfig& cfg, const ClassifyOptions& copts,
                                     const BumpProfile* bump, double horizon_factor = 8.0);

/// A posteriori check: no lambda below any Extinction is Propagation and
/// vice versa, over every run performed.
bool sweep_is_monotone(const std::vector<SweepRecord>& runs);

/// Threshold CSV: lambda, verdict, stop time, E at stop.
void write_sweep_csv(const std::string& path, const std::vector<SweepRecord>& runs);

} // namespace rdlab
