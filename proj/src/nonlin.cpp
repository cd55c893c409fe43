#include "rdlab/nonlin.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "rdlab/numerics.hpp"

namespace rdlab {

namespace {

using numerics::adaptive_simpson;
using numerics::find_root;

double pow_fast(double u, double p) {
  // Integer exponents come up in every shipped family; avoid pow() there.
  const int ip = int(std::lround(p));
  if (std::abs(p - double(ip)) < 1e-12 && ip >= 0 && ip <= 16) {
    double r = 1.0;
    for (int i = 0; i < ip; ++i) r *= u;
    return r;
  }
  return std::pow(u, p);
}

/// Dense cumulative table of V(u) = -int_0^u f with cubic Hermite
/// evaluation (the derivative -f is known exactly at the knots).
class CachedPotential {
public:
  CachedPotential(std::function<double(double)> f, double span, int panels = 8192)
      : f_(std::move(f)), h_(span / panels) {
    vs_.resize(panels + 1);
    vs_[0] = 0.0;
    for (int i = 0; i < panels; ++i) {
      const double a = h_ * i;
      vs_[i + 1] = vs_[i] - numerics::gauss20(f_, a, a + h_);
    }
  }

  double operator()(double u) const {
    u = std::clamp(u, 0.0, h_ * double(vs_.size() - 1));
    const int i = std::min<int>(int(u / h_), int(vs_.size()) - 2);
    const double t = (u - h_ * i) / h_;
    const double d0 = -f_(h_ * i) * h_;
    const double d1 = -f_(h_ * (i + 1)) * h_;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * vs_[i] + (t3 - 2 * t2 + t) * d0 +
           (-2 * t3 + 3 * t2) * vs_[i + 1] + (t3 - t2) * d1;
  }

private:
  std::function<double(double)> f_;
  double h_;
  std::vector<double> vs_;
};

double solve_theta_diamond(const std::function<double(double)>& V,
                           const std::function<double(double)>& f) {
  // V(1) < 0 or V(1) <= 0 and V eventually positive above 1.
  double hi = 1.5;
  while (V(hi) <= 0.0 && hi < 64.0) hi *= 1.5;
  if (V(hi) <= 0.0) return std::nan(""); // no root within range
  return find_root(V, 1.0, hi, 1e-12, [&f](double u) { return -f(u); });
}

void finalize_range(Nonlinearity& n) {
  if (n.theta_diamond && std::isfinite(*n.theta_diamond)) {
    n.u_max = std::max(1.5, 0.999 * *n.theta_diamond);
  } else {
    n.u_max = 1.5;
  }
}

} // namespace

std::string to_string(NonlinKind kind) {
  switch (kind) {
    case NonlinKind::Bistable: return "bistable";
    case NonlinKind::Ignition: return "ignition";
    case NonlinKind::Monostable: return "monostable";
  }
  return "?";
}

NonlinKind nonlin_kind_from_string(const std::string& s) {
  if (s == "bistable") return NonlinKind::Bistable;
  if (s == "ignition") return NonlinKind::Ignition;
  if (s == "monostable") return NonlinKind::Monostable;
  throw ConfigError("unknown nonlinearity kind '" + s + "'");
}

bool ValidationReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

const ValidationCheck* ValidationReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::string ValidationReport::summary() const {
  std::ostringstream out;
  for (const auto& c : checks) {
    out << (c.pass ? "PASS " : "FAIL ") << c.name;
    if (!c.pass) {
      out << "  (worst at u=" << c.worst_u << ", violation=" << c.worst_violation << ")";
    }
    out << "\n";
  }
  return out.str();
}

double Nonlinearity::clip_ceiling() const {
  if (theta_diamond && std::isfinite(*theta_diamond)) return 0.999 * *theta_diamond;
  return u_max;
}

double Nonlinearity::f_clamped(double u) const { return f(std::clamp(u, 0.0, u_max)); }

Nonlinearity make_cubic_bistable(double theta0) {
  if (!(theta0 > 0.0 && theta0 < 0.5)) {
    throw ConfigError("cubic bistable: theta0 must lie in (0, 1/2) "
                      "(balanced-or-reversed potential otherwise)");
  }
  Nonlinearity n;
  n.kind = NonlinKind::Bistable;
  n.family = "cubic_bistable";
  n.params = {{"theta0", theta0}};
  n.f = [theta0](double u) { return u * (u - theta0) * (1.0 - u); };
  n.f_prime = [theta0](double u) { return -3.0 * u * u + 2.0 * (1.0 + theta0) * u - theta0; };
  n.V = [theta0](double u) {
    const double u2 = u * u;
    return u2 * u2 / 4.0 - (1.0 + theta0) * u2 * u / 3.0 + theta0 * u2 / 2.0;
  };
  n.theta0 = theta0;
  n.theta_star = find_root(n.V, theta0, 1.0, 1e-14, [f = n.f](double u) { return -f(u); });
  n.theta_diamond = solve_theta_diamond(n.V, n.f);
  n.decay_p = 1.0;
  n.decay_k = theta0;
  n.theta1 =
      ((1.0 + theta0) - std::sqrt((1.0 + theta0) * (1.0 + theta0) - 3.0 * theta0)) / 3.0;
  finalize_range(n);
  return n;
}

Nonlinearity make_degenerate_bistable(double theta0, double p) {
  if (!(p > 1.0)) throw ConfigError("degenerate bistable: p must exceed 1");
  if (!(theta0 > 0.0 && theta0 < (p + 1.0) / (p + 3.0))) {
    throw ConfigError("degenerate bistable: need 0 < theta0 < (p+1)/(p+3) "
                      "(balanced-or-reversed potential otherwise)");
  }
  Nonlinearity n;
  n.kind = NonlinKind::Bistable;
  n.family = "degenerate_bistable";
  n.params = {{"theta0", theta0}, {"p", p}};
  n.f = [theta0, p](double u) { return pow_fast(u, p) * (u - theta0) * (1.0 - u); };
  n.f_prime = [theta0, p](double u) {
    if (u == 0.0) return 0.0;
    return pow_fast(u, p - 1.0) *
           (-(p + 2.0) * u * u + (p + 1.0) * (1.0 + theta0) * u - p * theta0);
  };
  n.V = [theta0, p](double u) {
    return pow_fast(u, p + 3.0) / (p + 3.0) - (1.0 + theta0) * pow_fast(u, p + 2.0) / (p + 2.0) +
           theta0 * pow_fast(u, p + 1.0) / (p + 1.0);
  };
  n.theta0 = theta0;
  n.theta_star = find_root(n.V, theta0, 1.0, 1e-14, [f = n.f](double u) { return -f(u); });
  n.theta_diamond = solve_theta_diamond(n.V, n.f);
  n.decay_p = p;
  n.decay_k = theta0;
  const double disc =
      (p + 1.0) * (p + 1.0) * (1.0 + theta0) * (1.0 + theta0) - 4.0 * (p + 2.0) * p * theta0;
  n.theta1 = ((p + 1.0) * (1.0 + theta0) - std::sqrt(disc)) / (2.0 * (p + 2.0));
  finalize_range(n);
  return n;
}

Nonlinearity make_ignition(double theta0, double amp) {
  if (!(theta0 > 0.0 && theta0 < 1.0)) throw ConfigError("ignition: theta0 must lie in (0,1)");
  if (!(amp > 0.0)) throw ConfigError("ignition: amp must be positive");
  const double delta = (1.0 - theta0) / 3.0; // f is convex on [theta0, theta0 + delta]
  Nonlinearity n;
  n.kind = NonlinKind::Ignition;
  n.family = "ignition";
  n.params = {{"theta0", theta0},
              {"amp", amp},
              {"delta", delta},
              {"eps1", 0.5 * delta},
              {"theta1_growth", 0.5 * theta0},
              {"theta2_growth", theta0 + delta / 3.0}};
  n.f = [theta0, amp](double u) {
    if (u <= theta0) return 0.0;
    const double w = u - theta0;
    return amp * w * w * (1.0 - u);
  };
  n.f_prime = [theta0, amp](double u) {
    if (u <= theta0) return 0.0;
    return amp * (u - theta0) * (2.0 + theta0 - 3.0 * u);
  };
  n.V = [theta0, amp](double u) {
    if (u <= theta0) return 0.0;
    const double w = u - theta0;
    return -amp * ((1.0 - theta0) * w * w * w / 3.0 - w * w * w * w / 4.0);
  };
  n.theta0 = theta0;
  n.theta_diamond = theta0 + 4.0 * (1.0 - theta0) / 3.0;
  n.theta1 = theta0;
  finalize_range(n);
  return n;
}

Nonlinearity make_fisher(double p) {
  if (!(p > 1.0)) throw ConfigError("fisher: p must exceed 1 (f'(0)=0 fails otherwise)");
  Nonlinearity n;
  n.kind = NonlinKind::Monostable;
  n.family = "fisher";
  n.params = {{"p", p}};
  n.f = [p](double u) { return pow_fast(u, p) * (1.0 - u); };
  n.f_prime = [p](double u) {
    if (u == 0.0) return 0.0;
    return pow_fast(u, p - 1.0) * (p - (p + 1.0) * u);
  };
  n.V = [p](double u) {
    return -pow_fast(u, p + 1.0) / (p + 1.0) + pow_fast(u, p + 2.0) / (p + 2.0);
  };
  n.theta_diamond = (p + 2.0) / (p + 1.0);
  n.decay_p = p;
  n.theta1 = 0.0;
  n.hair_trigger = (p <= 3.0); // p_c = 3 in one dimension
  finalize_range(n);
  return n;
}

Nonlinearity make_arrhenius(double a) {
  if (!(a > 0.0)) throw ConfigError("arrhenius: a must be positive");
  Nonlinearity n;
  n.kind = NonlinKind::Monostable;
  n.family = "arrhenius";
  n.params = {{"a", a}};
  n.f = [a](double u) { return u <= 0.0 ? 0.0 : (1.0 - u) * std::exp(-a / u); };
  n.f_prime = [a](double u) {
    if (u <= 0.0) return 0.0;
    return std::exp(-a / u) * (a * (1.0 - u) / (u * u) - 1.0);
  };
  auto cache = std::make_shared<CachedPotential>(n.f, 4.0);
  n.V = [cache](double u) { return (*cache)(u); };
  n.theta_diamond = solve_theta_diamond(n.V, n.f);
  n.theta1 = 0.0;
  finalize_range(n);
  return n;
}

Nonlinearity make_tabulated(NonlinKind kind, std::vector<double> us, std::vector<double> fs) {
  if (us.size() != fs.size() || us.size() < 4) {
    throw ConfigError("tabulated: need >= 4 matching samples");
  }
  if (us.front() != 0.0) throw ConfigError("tabulated: samples must start at u = 0");
  auto spline = std::make_shared<numerics::CubicSpline>(us, fs);
  const double span = us.back();
  Nonlinearity n;
  n.kind = kind;
  n.family = "tabulated";
  n.f = [spline](double u) { return (*spline)(u); };
  n.f_prime = [spline](double u) { return spline->derivative(u); };
  auto cache = std::make_shared<CachedPotential>(n.f, span);
  n.V = [cache](double u) { return (*cache)(u); };

  // Distinguished roots, where the tabulated data actually has them.
  auto fv = n.f;
  if (kind != NonlinKind::Monostable) {
    double prev = 1e-3 * span;
    double prev_f = fv(prev);
    for (int i = 1; i <= 512; ++i) {
      const double u = 1e-3 * span + (1.0 - 1e-3 * span) * double(i) / 512.0;
      const double cur = fv(u);
      if (prev_f < 0.0 && cur >= 0.0 && u < 1.0) {
        n.theta0 = find_root(fv, prev, u, 1e-12);
        break;
      }
      prev = u;
      prev_f = cur;
    }
  }
  if (kind == NonlinKind::Bistable && n.theta0 && n.V(1.0) < 0.0) {
    n.theta_star = find_root(n.V, *n.theta0, 1.0, 1e-12, [fv](double u) { return -fv(u); });
  }
  if (span > 1.0 && n.V(span) > 0.0) {
    n.theta_diamond = find_root(n.V, 1.0, span, 1e-12, [fv](double u) { return -fv(u); });
  }
  if (n.f_prime(0.0) < 0.0) {
    n.decay_p = 1.0;
    n.decay_k = -n.f_prime(0.0);
  }
  n.theta1 = 0.0;
  if (n.f_prime(0.0) < 0.0 && n.theta0) {
    double t1 = 0.0;
    for (int i = 1; i <= 256; ++i) {
      const double u = *n.theta0 * double(i) / 256.0;
      if (n.f_prime(u) > 0.0) break;
      t1 = u;
    }
    n.theta1 = t1;
  }
  finalize_range(n);
  n.u_max = std::min(n.u_max, span);
  return n;
}

namespace {

struct CheckBuilder {
  ValidationCheck check;
  explicit CheckBuilder(std::string name) { check.name = std::move(name); }
  void violation(double u, double amount) {
    if (amount > check.worst_violation) {
      check.worst_violation = amount;
      check.worst_u = u;
      check.pass = false;
    }
  }
  void fail(double u, double amount) {
    check.pass = false;
    check.worst_u = u;
    check.worst_violation = amount;
  }
};

} // namespace

ValidationReport validate(const Nonlinearity& n, int samples) {
  if (samples < 100) throw ConfigError("validate: need samples >= 100");
  ValidationReport report;
  const bool tabulated_V = (n.family == "arrhenius" || n.family == "tabulated");
  const double v_tol_scale = tabulated_V ? 1e-8 : 1e-10;

  {
    CheckBuilder c("f(0) = 0");
    const double v = std::abs(n.f(0.0));
    if (v > 1e-12) c.fail(0.0, v);
    report.checks.push_back(c.check);
  }
  {
    CheckBuilder c("f(1) = 0");
    const double v = std::abs(n.f(1.0));
    if (v > 1e-9) c.fail(1.0, v);
    report.checks.push_back(c.check);
  }
  {
    CheckBuilder c("f < 0 above 1");
    for (int i = 1; i <= samples; ++i) {
      const double u = 1.0 + (n.u_max - 1.0) * double(i) / double(samples);
      const double v = n.f(u);
      if (v > 1e-12) c.violation(u, v);
    }
    report.checks.push_back(c.check);
  }
  {
    // V(u) = -int_0^u f, checked by incremental adaptive quadrature.
    CheckBuilder c("V consistency");
    double acc = 0.0;
    double prev = 0.0;
    for (int i = 1; i <= samples; ++i) {
      const double u = n.u_max * double(i) / double(samples);
      acc += adaptive_simpson(n.f, prev, u, 1e-14);
      prev = u;
      const double err = std::abs(n.V(u) + acc);
      if (err > v_tol_scale * (1.0 + u)) c.violation(u, err);
    }
    report.checks.push_back(c.check);
  }

  const double theta0 = n.theta0.value_or(0.0);
  if (n.kind == NonlinKind::Bistable) {
    CheckBuilder c("bistable sign pattern");
    if (!n.theta0) {
      // No middle zero: flag the place where negativity near 0 first fails.
      for (int i = 1; i <= samples; ++i) {
        const double u = double(i) / double(samples);
        if (n.f(u) > 1e-12) {
          c.fail(u, n.f(u));
          break;
        }
        if (u > 0.5) break;
      }
      if (c.check.pass) c.fail(0.0, 1.0);
    } else {
      for (int i = 1; i < samples; ++i) {
        const double u = theta0 * double(i) / double(samples);
        if (u <= 0.0 || u >= theta0) continue;
        const double v = n.f(u);
        if (v > 1e-12) c.violation(u, v);
      }
      for (int i = 1; i < samples; ++i) {
        const double u = theta0 + (1.0 - theta0) * double(i) / double(samples);
        if (u <= theta0 || u >= 1.0) continue;
        const double v = n.f(u);
        if (v < -1e-12) c.violation(u, -v);
      }
    }
    report.checks.push_back(c.check);

    {
      CheckBuilder c2("V(1) < 0");
      if (!(n.V(1.0) < 0.0)) c2.fail(1.0, n.V(1.0));
      report.checks.push_back(c2.check);
    }
    {
      CheckBuilder c2("f' <= 0 on [0, theta1]");
      for (int i = 0; i <= samples; ++i) {
        const double u = n.theta1 * double(i) / double(samples);
        const double v = n.f_prime(u);
        if (v > 1e-10) c2.violation(u, v);
      }
      report.checks.push_back(c2.check);
    }
    if (n.decay_p && n.decay_k) {
      CheckBuilder c2("power law at 0");
      const double u = 1e-6;
      const double ratio = n.f(u) / pow_fast(u, *n.decay_p);
      const double err = std::abs(ratio + *n.decay_k);
      if (err > 1e-4 * (1.0 + *n.decay_k)) c2.fail(u, err);
      report.checks.push_back(c2.check);
    }
    if (n.theta_star) {
      CheckBuilder c2("V(theta*) = 0");
      const double v = std::abs(n.V(*n.theta_star));
      if (v > 1e-10) c2.fail(*n.theta_star, v);
      report.checks.push_back(c2.check);

      CheckBuilder c3("V < 0 on (theta*, theta_diamond)");
      const double hi = std::min(n.theta_diamond.value_or(n.u_max), n.u_max);
      for (int i = 1; i < samples; ++i) {
        const double u = *n.theta_star + (hi - *n.theta_star) * double(i) / double(samples);
        if (u <= *n.theta_star + 1e-9 || u >= hi - 1e-9) continue;
        const double v = n.V(u);
        if (v > 1e-12) c3.violation(u, v);
      }
      report.checks.push_back(c3.check);
    }
  }

  if (n.kind == NonlinKind::Ignition) {
    CheckBuilder c("ignition sign pattern");
    for (int i = 0; i <= samples; ++i) {
      const double u = theta0 * double(i) / double(samples);
      const double v = std::abs(n.f(u));
      if (v > 1e-12) c.violation(u, v);
    }
    for (int i = 1; i < samples; ++i) {
      const double u = theta0 + (1.0 - theta0) * double(i) / double(samples);
      if (u <= theta0 || u >= 1.0) continue;
      const double v = n.f(u);
      if (v < -1e-12) c.violation(u, -v);
    }
    report.checks.push_back(c.check);

    const double delta = n.params.count("delta") ? n.params.at("delta") : (1.0 - theta0) / 3.0;
    {
      CheckBuilder c2("convexity on [theta0, theta0+delta]");
      const double h = delta / 64.0;
      for (int i = 1; i < 64; ++i) {
        const double u = theta0 + delta * double(i) / 64.0;
        const double d2 = n.f(u - h) - 2.0 * n.f(u) + n.f(u + h);
        if (d2 < -1e-10) c2.violation(u, -d2);
      }
      report.checks.push_back(c2.check);
    }
    {
      // Growth condition used by the sharp-threshold argument.
      CheckBuilder c2("growth condition");
      const double eps1 = n.params.count("eps1") ? n.params.at("eps1") : delta / 2.0;
      const double th1 = n.params.count("theta1_growth") ? n.params.at("theta1_growth") : theta0 / 2.0;
      const double th2 =
          n.params.count("theta2_growth") ? n.params.at("theta2_growth") : theta0 + delta / 3.0;
      for (int i = 0; i <= 64; ++i) {
        const double th = th1 + (th2 - th1) * double(i) / 64.0;
        for (int j = 0; j <= 16; ++j) {
          const double eps = eps1 * double(j) / 16.0;
          const double lhs = n.f(th + eps * (th - th1));
          const double rhs = (1.0 + eps) * n.f(th);
          if (lhs < rhs - 1e-12) c2.violation(th, rhs - lhs);
        }
      }
      report.checks.push_back(c2.check);
    }
  }

  if (n.kind == NonlinKind::Monostable) {
    CheckBuilder c("monostable sign pattern");
    for (int i = 1; i < samples; ++i) {
      const double u = double(i) / double(samples);
      if (u >= 1.0) continue;
      const double v = n.f(u);
      if (v < -1e-12) c.violation(u, -v);
    }
    report.checks.push_back(c.check);

    CheckBuilder c2("f'(0) = 0");
    const double d0 = std::abs(n.f_prime(0.0));
    const double near = std::abs(n.f(1e-6) / 1e-6);
    if (d0 > 1e-12 || near > 1e-4) c2.fail(0.0, std::max(d0, near));
    report.checks.push_back(c2.check);
  }

  if (n.kind != NonlinKind::Bistable) {
    CheckBuilder c("V <= 0 up to theta_diamond");
    const double hi = std::min(n.theta_diamond.value_or(n.u_max), n.u_max);
    for (int i = 0; i <= samples; ++i) {
      const double u = hi * double(i) / double(samples);
      const double v = n.V(u);
      if (v > 1e-12 * (1.0 + u)) c.violation(u, v);
    }
    report.checks.push_back(c.check);
  }

  return report;
}

nlohmann::json to_json(const Nonlinearity& n) {
  if (n.family == "tabulated") {
    throw ConfigError("tabulated nonlinearity is not serializable");
  }
  nlohmann::json j;
  j["kind"] = to_string(n.kind);
  j["family"] = n.family;
  j["params"] = n.params;
  return j;
}

Nonlinearity nonlinearity_from_json(const nlohmann::json& j) {
  const std::string family = j.at("family").get<std::string>();
  const auto& p = j.at("params");
  if (family == "cubic_bistable") return make_cubic_bistable(p.at("theta0").get<double>());
  if (family == "degenerate_bistable") {
    return make_degenerate_bistable(p.at("theta0").get<double>(), p.at("p").get<double>());
  }
  if (family == "ignition") {
    return make_ignition(p.at("theta0").get<double>(),
                         p.contains("amp") ? p.at("amp").get<double>() : 2.0);
  }
  if (family == "fisher") return make_fisher(p.at("p").get<double>());
  if (family == "arrhenius") return make_arrhenius(p.at("a").get<double>());
  throw ConfigError("unknown nonlinearity family '" + family + "'");
}

} // namespace rdlab
