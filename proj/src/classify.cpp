#include "rdlab/classify.hpp"

#include <cmath>
#include <numbers>

#include "rdlab/numerics.hpp"

namespace rdlab {

std::string to_string(BehaviorLabel label) {
  switch (label) {
    case BehaviorLabel::Propagation: return "propagation";
    case BehaviorLabel::BumpConvergence: return "bump_convergence";
    case BehaviorLabel::ThetaZeroConvergence: return "theta0_convergence";
    case BehaviorLabel::Extinction: return "extinction";
    case BehaviorLabel::Undecided: return "undecided";
  }
  return "?";
}

BehaviorLabel behavior_from_string(const std::string& s) {
  if (s == "propagation") return BehaviorLabel::Propagation;
  if (s == "bump_convergence") return BehaviorLabel::BumpConvergence;
  if (s == "theta0_convergence") return BehaviorLabel::ThetaZeroConvergence;
  if (s == "extinction") return BehaviorLabel::Extinction;
  if (s == "undecided") return BehaviorLabel::Undecided;
  throw ConfigError("unknown behavior label '" + s + "'");
}

nlohmann::json Verdict::to_json() const {
  nlohmann::json j;
  j["label"] = to_string(label);
  j["trigger"] = trigger;
  j["time"] = time;
  j["margins"] = margins;
  j["energy_at_stop"] = energy_at_stop;
  j["heuristic"] = heuristic;
  return j;
}

Classifier::Classifier(const Nonlinearity& n, ClassifyOptions opts, ClassifierRefs refs)
    : n_(n), opts_(opts), refs_(refs) {}

double Classifier::bump_distance(const Trajectory& traj) {
  if (!refs_.bump) throw ConfigError("classifier: no bump reference provided");
  const Field& u = traj.state;
  if (bump_cache_n_ != u.grid.n) {
    bump_cache_ = sample_bump(*refs_.bump, u.grid);
    bump_cache_n_ = u.grid.n;
  }
  return (u.values - bump_cache_).abs().maxCoeff();
}

std::optional<Verdict> Classifier::observe(const Trajectory& traj) {
  if (traj.energy_series.empty()) {
    throw ConfigError("classifier: runs must record the energy probe");
  }
  const double t = traj.times.back();
  const double E = traj.energy_series.back();
  const double E0_data = traj.energy_series.front();
  const double eps_E = 1e-6 * (1.0 + std::abs(E0_data));
  const double u0 = traj.u0_series.back();

  // (a) negative energy certifies spreading for every kind.
  if (E < -eps_E) {
    Verdict v;
    v.label = BehaviorLabel::Propagation;
    v.trigger = "energy_negative";
    v.time = t;
    v.margins = {{"E", E}, {"eps_E", eps_E}};
    v.energy_at_stop = E;
    return v;
  }

  // (b) extinction barriers.
  if (n_.kind != NonlinKind::Monostable) {
    const double theta0 = n_.theta0.value_or(0.0);
    if (u0 < theta0 - opts_.eps_u) {
      Verdict v;
      v.label = BehaviorLabel::Extinction;
      v.trigger = "u0_below_theta0";
      v.time = t;
      v.margins = {{"u0", u0}, {"theta0", theta0}};
      v.energy_at_stop = E;
      return v;
    }
  } else {
    if (u0 <= 0.0) {
      Verdict v;
      v.label = BehaviorLabel::Extinction;
      v.trigger = "u0_zero";
      v.time = t;
      v.energy_at_stop = E;
      return v;
    }
    if (opts_.supercritical_margin > 0.0 && n_.family == "fisher" && n_.decay_p &&
        *n_.decay_p > 3.0) {
      // f <= u^p with p > 3: once the heat-majorant budget is below the
      // margin, the solution stays under a decaying multiple of the heat
      // flow and extinction follows.
      const double p = *n_.decay_p;
      const double mass = quadrature(traj.state, [](double u) { return u; });
      const double q = (p - 1.0) * (p - 1.0) / (p - 3.0) * mass * mass *
                       std::pow(u0, p - 3.0) / (4.0 * std::numbers::pi);
      if (q < opts_.supercritical_margin) {
        Verdict v;
        v.label = BehaviorLabel::Extinction;
        v.trigger = "supercritical_mass_certificate";
        v.time = t;
        v.margins = {{"mass", mass}, {"sup", u0}, {"Q", q}};
        v.energy_at_stop = E;
        return v;
      }
    }
    if (u0 < opts_.eps_ext && int(traj.size()) > opts_.dwell) {
      // No barrier below theta0 exists here; a trailing decreasing window
      // is the stopping heuristic, and the verdict is flagged as such.
      bool decreasing = true;
      const std::size_t start = traj.size() - std::size_t(opts_.dwell);
      for (std::size_t i = start; i + 1 < traj.size(); ++i) {
        if (traj.u0_series[i + 1] > traj.u0_series[i] + 1e-14) {
          decreasing = false;
          break;
        }
      }
      if (decreasing) {
        Verdict v;
        v.label = BehaviorLabel::Extinction;
        v.trigger = "u0_small_window";
        v.time = t;
        v.margins = {{"u0", u0}, {"eps_ext", opts_.eps_ext}};
        v.energy_at_stop = E;
        v.heuristic = true;
        return v;
      }
    }
  }

  // (c) uniform convergence to the bump, held over a dwell window.
  if (n_.kind == NonlinKind::Bistable && refs_.bump) {
    const double dist = bump_distance(traj);
    const double egap = std::abs(E - refs_.bump->E0);
    if (dist < opts_.tol_bump && egap < opts_.tol_E) {
      if (++bump_dwell_ >= opts_.dwell) {
        Verdict v;
        v.label = BehaviorLabel::BumpConvergence;
        v.trigger = "bump_distance_dwell";
        v.time = t;
        v.margins = {{"dist", dist}, {"E_gap", egap}};
        v.energy_at_stop = E;
        return v;
      }
    } else {
      bump_dwell_ = 0;
    }
  }

  // (d) ignition plateau at theta0.
  if (n_.kind == NonlinKind::Ignition) {
    const double theta0 = *n_.theta0;
    if (u0 > theta0 && u0 - theta0 < opts_.tol_theta && E < opts_.tol_E) {
      if (++theta_dwell_ >= opts_.dwell) {
        Verdict v;
        v.label = BehaviorLabel::ThetaZeroConvergence;
        v.trigger = "theta0_dwell";
        v.time = t;
        v.margins = {{"u0_gap", u0 - theta0}, {"E", E}};
        v.energy_at_stop = E;
        return v;
      }
    } else {
      theta_dwell_ = 0;
    }
  }

  return std::nullopt;
}

ClassifiedRun run_classified(const Field& phi, const Nonlinearity& n, const SolverConfig& cfg,
                             const EnergyProbe& probe, const ClassifyOptions& opts,
                             const ClassifierRefs& refs) {
  EnergyProbe p = probe;
  p.wants_E = true;
  Classifier classifier(n, opts, refs);

  std::optional<Verdict> verdict;
  bool polishing = false;
  auto polish_done = [&](double E) -> bool {
    switch (verdict->label) {
      case BehaviorLabel::Propagation:
        return E <= opts.propagation_certificate;
      case BehaviorLabel::Extinction:
      case BehaviorLabel::ThetaZeroConvergence:
        return std::abs(E) <= opts.zero_certificate;
      default:
        return true;
    }
  };
  auto stop = [&](const Trajectory& traj) -> bool {
    const double E = traj.energy_series.back();
    if (polishing) return polish_done(E);
    verdict = classifier.observe(traj);
    if (!verdict) return false;
    if (!opts.polish_energy) return true;
    // Keep integrating until the energy settles into the verdict's class
    // (or t_max), so terminal crosschecks see the limit value.
    polishing = true;
    return polish_done(E);
  };

  ClassifiedRun out;
  out.traj = run(phi, n, cfg, p, stop);
  if (verdict) {
    out.verdict = *verdict;
  } else {
    out.verdict.label = BehaviorLabel::Undecided;
    out.verdict.trigger = "horizon";
    out.verdict.time = out.traj.times.back();
  }
  out.verdict.energy_at_stop = out.traj.energy_series.back();
  return out;
}

double edge_speed(const Trajectory& traj, double delta) {
  std::vector<double> ts, rs;
  const bool use_series = std::abs(delta - traj.edge_delta) < 1e-15;
  if (!use_series && traj.snapshots.empty()) {
    throw ConfigError("edge_speed: need snapshots to evaluate a non-recorded delta");
  }
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double r =
        use_series ? traj.r_delta_series[i] : leading_edge(traj.snapshots[i], delta);
    if (std::isfinite(r)) {
      ts.push_back(traj.times[i]);
      rs.push_back(r);
    }
  }
  if (ts.size() < 10) {
    throw NumericError("edge_speed: insufficient finite leading-edge samples");
  }
  const double t_mid = 0.5 * (traj.times.front() + traj.times.back());
  std::vector<double> tt, rrr;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (ts[i] >= t_mid) {
      tt.push_back(ts[i]);
      rrr.push_back(rs[i]);
    }
  }
  if (tt.size() < 2) throw NumericError("edge_speed: trailing half has too few samples");
  return numerics::fit_line(tt, rrr).slope;
}

ConsistencyReport crosscheck(const Verdict& verdict, const EnergyReport& report,
                             const Nonlinearity&, std::optional<double> E0) {
  ConsistencyReport out;
  const double E_final = report.E_series.empty() ? 0.0 : report.E_series.back().second;
  switch (verdict.label) {
    case BehaviorLabel::Extinction:
      out.expected = "E -> 0";
      out.value = std::abs(E_final);
      out.threshold = 1e-3;
      break;
    case BehaviorLabel::ThetaZeroConvergence:
      out.expected = "E -> 0";
      out.value = std::abs(E_final);
      out.threshold = 1e-3;
      break;
    case BehaviorLabel::Propagation:
      out.expected = "E below any floor";
      out.value = E_final;
      out.threshold = -1.0; // finite checkpoint
      out.ok = E_final < -1.0;
      out.margin = -1.0 - E_final;
      return out;
    case BehaviorLabel::BumpConvergence:
      if (!E0) throw ConfigError("crosscheck: bump convergence needs E0");
      out.expected = "E -> E0";
      out.value = std::abs(E_final - *E0);
      out.threshold = 1e-2;
      break;
    case BehaviorLabel::Undecided:
      out.expected = "no certificate for an undecided run";
      out.ok = false;
      return out;
  }
  out.ok = out.value < out.threshold;
  out.margin = out.threshold - out.value;
  return out;
}

} // namespace rdlab
