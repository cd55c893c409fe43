#include "rdlab/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>

#include "rdlab/numerics.hpp"

namespace rdlab {

std::string to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::RectWidth: return "rect_width";
    case FamilyKind::RectHeight: return "rect_height";
    case FamilyKind::GaussianAmplitude: return "gaussian_amplitude";
    case FamilyKind::BumpScale: return "bump_scale";
  }
  return "?";
}

FamilyKind family_kind_from_string(const std::string& s) {
  if (s == "rect_width") return FamilyKind::RectWidth;
  if (s == "rect_height") return FamilyKind::RectHeight;
  if (s == "gaussian_amplitude") return FamilyKind::GaussianAmplitude;
  if (s == "bump_scale") return FamilyKind::BumpScale;
  throw ConfigError("unknown family kind '" + s + "'");
}

std::string to_string(TrichotomyLabel label) {
  switch (label) {
    case TrichotomyLabel::AllExtinct: return "all_extinct";
    case TrichotomyLabel::SharpThreshold: return "sharp_threshold";
    case TrichotomyLabel::AllPropagate: return "all_propagate";
  }
  return "?";
}

Field Family::materialize(double lambda, const Grid& grid) const {
  if (!(lambda > 0.0)) throw ConfigError("family: lambda must be positive");
  const double ramp = 2.0 * grid.dx; // mollification width for characteristic data
  Eigen::ArrayXd v(grid.n);
  for (Eigen::Index i = 0; i < grid.n; ++i) {
    const double x = grid.x(i);
    double u = 0.0;
    switch (kind) {
      case FamilyKind::RectWidth:
        u = height * std::clamp((lambda - x) / ramp, 0.0, 1.0);
        break;
      case FamilyKind::RectHeight:
        u = lambda * std::clamp((width - x) / ramp, 0.0, 1.0);
        break;
      case FamilyKind::GaussianAmplitude:
        u = lambda * std::exp(-x * x / (2.0 * sigma * sigma));
        break;
      case FamilyKind::BumpScale:
        break; // filled below
    }
    v[i] = u;
  }
  if (kind == FamilyKind::BumpScale) {
    if (!bump) throw ConfigError("family: bump_scale needs a bump profile");
    v = lambda * sample_bump(*bump, grid);
  }
  Field field(grid, std::move(v));
  repair_symmetric_decreasing(field);
  return field;
}

double Family::amplitude(double lambda) const {
  switch (kind) {
    case FamilyKind::RectWidth: return height;
    case FamilyKind::RectHeight: return lambda;
    case FamilyKind::GaussianAmplitude: return lambda;
    case FamilyKind::BumpScale: return bump ? lambda * bump->theta_star : lambda;
  }
  return 0.0;
}

double Family::halfwidth(double lambda) const {
  switch (kind) {
    case FamilyKind::RectWidth: return lambda + 1.0;
    case FamilyKind::RectHeight: return width + 1.0;
    case FamilyKind::GaussianAmplitude: return 6.0 * sigma;
    case FamilyKind::BumpScale: return bump ? bump->grid.length() : 1.0;
  }
  return 1.0;
}

Family make_family(FamilyKind kind, double param, double lambda_max, const Nonlinearity& n,
                   std::shared_ptr<const BumpProfile> bump) {
  if (!(param > 0.0) && kind != FamilyKind::BumpScale) {
    throw ConfigError("family: parameter must be positive");
  }
  if (!(lambda_max > 0.0)) throw ConfigError("family: lambda_max must be positive");
  Family family;
  family.kind = kind;
  family.lambda_max = lambda_max;
  switch (kind) {
    case FamilyKind::RectWidth: family.height = param; break;
    case FamilyKind::RectHeight: family.width = param; break;
    case FamilyKind::GaussianAmplitude: family.sigma = param; break;
    case FamilyKind::BumpScale:
      if (!bump) throw ConfigError("family: bump_scale needs a bump profile");
      family.bump = std::move(bump);
      break;
  }
  if (family.amplitude(lambda_max) > n.clip_ceiling() + 1e-12) {
    throw ConfigError("family: amplitude at lambda_max exceeds the data ceiling (" +
                      std::to_string(n.clip_ceiling()) + ")");
  }

  // Spot checks: nodewise monotonicity in lambda, (SD), and the L2 -> 0 limit.
  const Grid probe = Grid::from_length(0.05, family.halfwidth(lambda_max) + 5.0);
  Field prev;
  for (int k = 1; k <= 8; ++k) {
    const double lambda = lambda_max * double(k) / 8.0;
    Field cur = family.materialize(lambda, probe);
    if (!is_symmetric_decreasing(cur)) {
      throw ConfigError("family: profile is not symmetric decreasing");
    }
    if (k > 1 && (cur.values < prev.values - 1e-12).any()) {
      throw ConfigError("family: monotonicity violation in lambda");
    }
    prev = cur;
  }
  auto l2 = [&](double lambda) {
    Field f = family.materialize(lambda, probe);
    return std::sqrt(quadrature(f, [](double u) { return u * u; }));
  };
  if (!(l2(lambda_max * std::pow(2.0, -12)) <= 0.1 * l2(lambda_max) + 1e-12)) {
    throw ConfigError("family: L2 norm does not vanish as lambda -> 0");
  }
  return family;
}

namespace {

Grid grid_for_lambda(const Family& family, double lambda, const Grid& base) {
  const double L = std::max(base.length(), 1.3 * family.halfwidth(lambda) + 10.0);
  return Grid::from_length(base.dx, L);
}

SweepRecord probe_lambda(const Family& family, double lambda, const Nonlinearity& n,
                         const Grid& base, const SolverConfig& cfg, const ClassifyOptions& copts,
                         double t_cap) {
  SolverConfig run_cfg = cfg;
  run_cfg.keep_snapshots = false;
  const Grid grid = grid_for_lambda(family, lambda, base);
  const Field phi = family.materialize(lambda, grid);
  SweepRecord rec;
  rec.lambda = lambda;
  while (true) {
    // Convergence labels need a dwell that scales with the horizon: near the
    // threshold the transient hover time diverges, and a fixed dwell would
    // misread a slow escape as convergence.
    ClassifyOptions run_opts = copts;
    const double records = run_cfg.t_max / (run_cfg.dt * double(run_cfg.record_every));
    run_opts.dwell = std::max(copts.dwell, int(0.5 * records));
    ClassifiedRun run = run_classified(phi, n, run_cfg, EnergyProbe{}, run_opts);
    rec.label = run.verdict.label;
    rec.stop_time = run.verdict.time;
    rec.energy = run.verdict.energy_at_stop;
    rec.t_max_used = run_cfg.t_max;
    const bool settled = rec.label == BehaviorLabel::Propagation ||
                         rec.label == BehaviorLabel::Extinction;
    if (settled || run_cfg.t_max * 2.0 > t_cap + 1e-9) return rec;
    run_cfg.t_max *= 2.0; // Undecided: try a longer horizon
  }
}

} // namespace

ThresholdResult find_threshold(const Family& family, const Nonlinearity& n,
                               const Grid& base_grid, const SolverConfig& cfg,
                               const ClassifyOptions& copts, const ThresholdConfig& tcfg) {
  if (!(tcfg.tol_lambda > 0.0)) throw ConfigError("find_threshold: tol_lambda must be positive");
  const double t_cap = tcfg.t_cap_factor * cfg.t_max;
  const double lambda_floor = 1e-8;

  ThresholdResult result;
  std::mutex record_mutex;
  auto probe = [&](double lambda) {
    SweepRecord rec = probe_lambda(family, lambda, n, base_grid, cfg, copts, t_cap);
    std::lock_guard<std::mutex> lock(record_mutex);
    result.runs.push_back(rec);
    return rec;
  };

  // Exponential search: one Extinction below, one Propagation above.
  double lo_extinct = std::numeric_limits<double>::quiet_NaN();
  double hi_prop = std::numeric_limits<double>::quiet_NaN();
  double next_up = std::min(tcfg.lambda_init, tcfg.lambda_max);
  double next_down = next_up;
  bool up_exhausted = false;

  while (!(std::isfinite(lo_extinct) && std::isfinite(hi_prop))) {
    std::vector<double> batch;
    if (!std::isfinite(hi_prop) && !up_exhausted) batch.push_back(next_up);
    if (!std::isfinite(lo_extinct) && next_down >= lambda_floor &&
        (batch.empty() || next_down != next_up)) {
      batch.push_back(next_down);
    }
    if (batch.empty()) break;

    std::vector<SweepRecord> recs(batch.size());
    numerics::parallel_for(batch.size(), tcfg.workers, [&](std::size_t i) {
      recs[i] = probe(batch[i]);
    });
    for (const auto& rec : recs) {
      if (rec.label == BehaviorLabel::Propagation) {
        if (!std::isfinite(hi_prop) || rec.lambda < hi_prop) hi_prop = rec.lambda;
      } else if (rec.label == BehaviorLabel::Extinction) {
        if (!std::isfinite(lo_extinct) || rec.lambda > lo_extinct) lo_extinct = rec.lambda;
      }
    }
    if (!std::isfinite(hi_prop)) {
      if (next_up >= tcfg.lambda_max) {
        up_exhausted = true;
      } else {
        next_up = std::min(next_up * 2.0, tcfg.lambda_max);
      }
    }
    if (!std::isfinite(lo_extinct)) {
      next_down *= 0.5;
      if (n.hair_trigger && std::isfinite(hi_prop) && next_down < tcfg.lambda_small_cap) {
        // Monostable below the Fujita exponent: arbitrarily small data
        // propagate, and the probes confirm it down to the cap.
        result.trichotomy = TrichotomyLabel::AllPropagate;
        result.lambda_lo = 0.0;
        result.lambda_hi = hi_prop;
        result.verdict_lo = BehaviorLabel::Undecided;
        result.verdict_hi = BehaviorLabel::Propagation;
        std::sort(result.runs.begin(), result.runs.end(),
                  [](const auto& a, const auto& b) { return a.lambda < b.lambda; });
        return result;
      }
      if (next_down < lambda_floor) {
        throw NumericError("find_threshold: no extinction found down to lambda = 1e-8");
      }
    }
    if (up_exhausted && !std::isfinite(hi_prop) && std::isfinite(lo_extinct)) break;
  }

  if (!std::isfinite(hi_prop)) {
    result.trichotomy = TrichotomyLabel::AllExtinct;
    result.lambda_lo = std::isfinite(lo_extinct) ? lo_extinct : tcfg.lambda_max;
    result.lambda_hi = tcfg.lambda_max;
    result.verdict_lo = BehaviorLabel::Extinction;
    result.verdict_hi = BehaviorLabel::Extinction;
    std::sort(result.runs.begin(), result.runs.end(),
              [](const auto& a, const auto& b) { return a.lambda < b.lambda; });
    return result;
  }

  // Bisection maintaining Extinction below, Propagation above.
  double lo = lo_extinct;
  double hi = hi_prop;
  while (hi - lo >= tcfg.tol_lambda) {
    const double mid = 0.5 * (lo + hi);
    const SweepRecord rec = probe(mid);
    if (rec.label == BehaviorLabel::Propagation) {
      hi = mid;
    } else if (rec.label == BehaviorLabel::Extinction) {
      lo = mid;
    } else {
      // Threshold-adjacent midpoint: report the bracket at current width.
      result.undecided_flag = true;
      break;
    }
  }

  result.trichotomy = TrichotomyLabel::SharpThreshold;
  result.lambda_lo = lo;
  result.lambda_hi = hi;
  result.verdict_lo = BehaviorLabel::Extinction;
  result.verdict_hi = BehaviorLabel::Propagation;
  std::sort(result.runs.begin(), result.runs.end(),
            [](const auto& a, const auto& b) { return a.lambda < b.lambda; });
  return result;
}

ThresholdEvidence threshold_behavior(const ThresholdResult& result, const Family& family,
                                     const Nonlinearity& n, const Grid& base_grid,
                                     const SolverConfig& cfg, const ClassifyOptions& copts,
                                     const BumpProfile* bump_profile, double horizon_factor) {
  if (result.trichotomy != TrichotomyLabel::SharpThreshold) {
    throw ConfigError("threshold_behavior: needs a sharp-threshold result");
  }
  ThresholdEvidence evidence;
  const double lambda_mid = result.lambda_mid();
  const Grid grid = grid_for_lambda(family, lambda_mid, base_grid);

  if (n.kind == NonlinKind::Monostable) {
    // The threshold value itself still goes extinct; witness it at lambda_lo
    // with the same horizon escalation the probes use.
    const SweepRecord rec = probe_lambda(family, result.lambda_lo, n, base_grid, cfg, copts,
                                         horizon_factor * 2.0 * cfg.t_max);
    evidence.lo_verdict = rec.label;
    return evidence;
  }

  SolverConfig run_cfg = cfg;
  run_cfg.keep_snapshots = false;
  run_cfg.t_max = cfg.t_max * horizon_factor;

  Eigen::ArrayXd bump_vals;
  Eigen::Index bump_n = -1;
  auto watch = [&](const Trajectory& traj) -> bool {
    const double u0 = traj.u0_series.back();
    const double E = traj.energy_series.back();
    if (n.kind == NonlinKind::Bistable && bump_profile) {
      if (traj.state.grid.n != bump_n) {
        bump_vals = sample_bump(*bump_profile, traj.state.grid);
        bump_n = traj.state.grid.n;
      }
      const double dist = (traj.state.values - bump_vals).abs().maxCoeff();
      if (dist < evidence.min_bump_distance) {
        evidence.min_bump_distance = dist;
        evidence.t_at_min_bump = traj.times.back();
      }
    }
    if (n.kind == NonlinKind::Ignition) {
      const double gap = u0 - *n.theta0;
      if (gap > 0.0 && gap < evidence.min_theta_gap) evidence.min_theta_gap = gap;
      if (gap >= 0.0 && gap <= copts.tol_theta && evidence.theta_band_entry < 0.0) {
        evidence.theta_band_entry = traj.times.back();
      }
    }
    // The run has committed: no further approach to the attractor is
    // possible once E is well below zero (E would have to climb back above
    // E0 >= 0) or the profile sits far under theta0 in the decay regime.
    if (E < -1.0) return true;
    if (n.theta0 && u0 < *n.theta0 - 0.1) return true;
    return false;
  };

  run(family.materialize(lambda_mid, grid), n, run_cfg, EnergyProbe{}, watch);

  // On the propagation side an ignition run peels away from theta0 at a gap
  // that shrinks only like a fourth root of the bracket width, so the band
  // crossing is witnessed on the extinction endpoint instead: that run's
  // u(0,t) descends continuously through every band above theta0.
  if (n.kind == NonlinKind::Ignition && evidence.theta_band_entry < 0.0) {
    const Grid lo_grid = grid_for_lambda(family, result.lambda_lo, base_grid);
    run(family.materialize(result.lambda_lo, lo_grid), n, run_cfg, EnergyProbe{}, watch);
  }
  return evidence;
}

bool sweep_is_monotone(const std::vector<SweepRecord>& runs) {
  double max_extinct = -std::numeric_limits<double>::infinity();
  double min_prop = std::numeric_limits<double>::infinity();
  for (const auto& rec : runs) {
    if (rec.label == BehaviorLabel::Extinction) max_extinct = std::max(max_extinct, rec.lambda);
    if (rec.label == BehaviorLabel::Propagation) min_prop = std::min(min_prop, rec.lambda);
  }
  return max_extinct < min_prop;
}

nlohmann::json ThresholdResult::to_json() const {
  nlohmann::json j;
  j["trichotomy"] = to_string(trichotomy);
  j["lambda_lo"] = lambda_lo;
  j["lambda_hi"] = lambda_hi;
  j["verdict_lo"] = to_string(verdict_lo);
  j["verdict_hi"] = to_string(verdict_hi);
  j["undecided_flag"] = undecided_flag;
  j["runs"] = nlohmann::json::array();
  for (const auto& rec : runs) {
    j["runs"].push_back({{"lambda", rec.lambda},
                         {"verdict", to_string(rec.label)},
                         {"stop_time", rec.stop_time},
                         {"energy", rec.energy},
                         {"t_max_used", rec.t_max_used}});
  }
  return j;
}

nlohmann::json ThresholdEvidence::to_json() const {
  nlohmann::json j;
  if (std::isfinite(min_bump_distance)) {
    j["min_bump_distance"] = min_bump_distance;
    j["t_at_min_bump"] = t_at_min_bump;
  }
  if (std::isfinite(min_theta_gap)) j["min_theta_gap"] = min_theta_gap;
  if (theta_band_entry >= 0.0) j["theta_band_entry"] = theta_band_entry;
  j["lo_verdict"] = to_string(lo_verdict);
  return j;
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRecord>& runs) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << "lambda,verdict,stop_time,E_stop\n";
  for (const auto& rec : runs) {
    out << numerics::fmt_g17(rec.lambda) << ',' << to_string(rec.label) << ','
        << numerics::fmt_g17(rec.stop_time) << ',' << numerics::fmt_g17(rec.energy) << '\n';
  }
}

} // namespace rdlab
