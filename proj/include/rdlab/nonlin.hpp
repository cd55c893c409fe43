#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rdlab/common.hpp"

#include <json.hpp>

namespace rdlab {

enum class NonlinKind { Bistable, Ignition, Monostable };

std::string to_string(NonlinKind kind);
NonlinKind nonlin_kind_from_string(const std::string& s);

struct ValidationCheck {
  std::string name;
  bool pass = true;
  double worst_u = 0.0;         // sample with the largest violation
  double worst_violation = 0.0; // magnitude of that violation
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;

  bool all_pass() const;
  const ValidationCheck* find(const std::string& name) const;
  std::string summary() const;
};

/// A reaction term f together with its potential V(u) = -int_0^u f, the
/// distinguished roots, and the structural metadata the rest of the code
/// keys on. Immutable after construction; cheap to copy and share.
struct Nonlinearity {
  NonlinKind kind = NonlinKind::Bistable;
  std::string family;                   // "cubic_bistable", "fisher", ...
  std::map<std::string, double> params; // factory parameters, serialized as-is

  std::function<double(double)> f;
  std::function<double(double)> f_prime;
  std::function<double(double)> V;

  std::optional<double> theta0;        // middle zero / ignition cutoff
  std::optional<double> theta_star;    // first positive root of V in (0,1)
  std::optional<double> theta_diamond; // root of V above 1, if any
  std::optional<double> decay_p;       // f(u) ~ -k u^p as u -> 0+
  std::optional<double> decay_k;
  double theta1 = 0.0;                 // f' <= 0 on [0, theta1]
  double u_max = 1.5;                  // validated upper range bound
  bool hair_trigger = false;           // monostable with p <= 3 (Fujita)

  /// Initial data are kept strictly below theta_diamond.
  double clip_ceiling() const;

  /// f evaluated with the argument clamped to [0, u_max]; the solvers use
  /// this so that round-off excursions never leave f's domain.
  double f_clamped(double u) const;
};

/// f(u) = u (u - theta0) (1 - u), 0 < theta0 < 1/2.
Nonlinearity make_cubic_bistable(double theta0);

/// f(u) = u^p (u - theta0) (1 - u): bistable with f'(0) = 0, algebraic
/// bump tails. Requires p > 1 and theta0 < (p+1)/(p+3).
Nonlinearity make_degenerate_bistable(double theta0, double p);

/// f = 0 on [0, theta0], f(u) = amp (u - theta0)^2 (1 - u) above. The
/// quadratic contact keeps f in C^1 and convex on [theta0, theta0 + delta]
/// with delta = (1 - theta0)/3.
Nonlinearity make_ignition(double theta0, double amp = 2.0);

/// f(u) = u^p (1 - u), p > 1.
Nonlinearity make_fisher(double p);

/// f(u) = (1 - u) exp(-a/u), a > 0. V is tabulated by quadrature.
Nonlinearity make_arrhenius(double a);

/// Cubic-spline interpolant of (us, fs) samples; V by quadrature of the
/// spline. `us` must start at 0 and be strictly increasing.
Nonlinearity make_tabulated(NonlinKind kind, std::vector<double> us, std::vector<double> fs);

/// Checks every structural condition of the declared kind on a sampling
/// grid. Never throws: failures are carried in the report.
ValidationReport validate(const Nonlinearity& n, int samples = 1000);

nlohmann::json to_json(const Nonlinearity& n);
Nonlinearity nonlinearity_from_json(const nlohmann::json& j);

} // namespace rdlab
