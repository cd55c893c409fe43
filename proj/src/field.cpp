#include "rdlab/field.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "rdlab/numerics.hpp"

namespace rdlab {

Eigen::ArrayXd Grid::xs() const {
  return Eigen::ArrayXd::LinSpaced(n, 0.0, dx * double(n - 1));
}

Grid Grid::from_length(double dx, double L) {
  if (!(dx > 0.0) || !(L > 0.0)) throw ConfigError("grid: dx and L must be positive");
  Grid g;
  g.dx = dx;
  g.n = Eigen::Index(std::lround(L / dx)) + 1;
  if (g.n < 4) throw ConfigError("grid: too few nodes");
  return g;
}

Field::Field(Grid g, Eigen::ArrayXd v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.n) throw ConfigError("field: value count does not match grid");
}

Field make_field(const Grid& grid, const std::function<double(double)>& fn) {
  Eigen::ArrayXd v(grid.n);
  for (Eigen::Index i = 0; i < grid.n; ++i) v[i] = fn(grid.x(i));
  Field field(grid, std::move(v));
  repair_symmetric_decreasing(field);
  return field;
}

void repair_symmetric_decreasing(Field& field) {
  auto& v = field.values;
  double ceil = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    double x = v[i];
    if (x < 0.0) x = 0.0;
    if (x > ceil) x = ceil;
    v[i] = x;
    ceil = x;
  }
}

bool is_symmetric_decreasing(const Field& field, double slack) {
  const auto& v = field.values;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v[i] < -slack) return false;
    if (i > 0 && v[i] > v[i - 1] + slack) return false;
  }
  return true;
}

LineField reflect(const Field& field) {
  const Eigen::Index n = field.grid.n;
  LineField lf;
  lf.dx = field.grid.dx;
  lf.x0 = -field.grid.length();
  lf.values.resize(2 * n - 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    lf.values[n - 1 - i] = field.values[i];
    lf.values[n - 1 + i] = field.values[i];
  }
  return lf;
}

LineField translate(const LineField& lf, double a) {
  const double shift = a / lf.dx;
  const long k = std::lround(shift);
  if (std::abs(shift - double(k)) > 1e-9) {
    throw NumericError("translate: shift must be a whole number of grid nodes");
  }
  LineField out;
  out.x0 = lf.x0;
  out.dx = lf.dx;
  out.values = Eigen::ArrayXd::Zero(lf.n());
  for (Eigen::Index i = 0; i < lf.n(); ++i) {
    const Eigen::Index j = i - k; // u(x - a) samples the source at x - a
    if (j >= 0 && j < lf.n()) out.values[i] = lf.values[j];
  }
  return out;
}

double quadrature(const Field& field, const std::function<double(double)>& integrand) {
  const auto& v = field.values;
  if (v.size() < 2) return 0.0;
  long double acc = 0.5L * integrand(v[0]);
  for (Eigen::Index i = 1; i + 1 < v.size(); ++i) acc += integrand(v[i]);
  acc += 0.5L * integrand(v[v.size() - 1]);
  return double(2.0L * acc * (long double)field.grid.dx);
}

WeightedNorms weighted_norms(const Field& field, double c) {
  if (!(c > 0.0)) throw ConfigError("weighted_norms: c must be positive");
  const double L = field.grid.length();
  if (c * L > 600.0) throw NumericError("weighted_norms: c*L beyond overflow guard");
  const LineField lf = reflect(field);
  const Eigen::Index m = lf.n();
  const double dx = lf.dx;
  long double l2 = 0.0L, du2 = 0.0L;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double w = std::exp(c * lf.x(i));
    double ux;
    if (i == 0) {
      ux = (lf.values[1] - lf.values[0]) / dx;
    } else if (i == m - 1) {
      ux = (lf.values[m - 1] - lf.values[m - 2]) / dx;
    } else {
      ux = (lf.values[i + 1] - lf.values[i - 1]) / (2.0 * dx);
    }
    const double trap = (i == 0 || i == m - 1) ? 0.5 : 1.0;
    l2 += (long double)(trap * w * lf.values[i] * lf.values[i]);
    du2 += (long double)(trap * w * ux * ux);
  }
  WeightedNorms norms;
  norms.l2c = double(l2 * (long double)dx);
  norms.h1c = norms.l2c + double(du2 * (long double)dx);
  return norms;
}

double leading_edge(const Field& field, double delta) {
  const auto& v = field.values;
  Eigen::Index last = -1;
  for (Eigen::Index i = v.size() - 1; i >= 0; --i) {
    if (v[i] >= delta) {
      last = i;
      break;
    }
  }
  if (last < 0) return -std::numeric_limits<double>::infinity();
  if (last == v.size() - 1) return field.grid.length();
  const double u0 = v[last], u1 = v[last + 1];
  const double frac = (u0 - delta) / std::max(u0 - u1, 1e-300);
  return field.grid.x(last) + field.grid.dx * std::min(1.0, frac);
}

Field expand_to(const Field& field, const Grid& larger) {
  if (std::abs(larger.dx - field.grid.dx) > 1e-15 || larger.n < field.grid.n) {
    throw ConfigError("expand_to: target grid must extend the current one");
  }
  Eigen::ArrayXd v = Eigen::ArrayXd::Zero(larger.n);
  v.head(field.grid.n) = field.values;
  return Field(larger, std::move(v));
}

void write_field_csv(const std::string& path, const Field& field) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << "x,u\n";
  for (Eigen::Index i = 0; i < field.grid.n; ++i) {
    out << numerics::fmt_g17(field.grid.x(i)) << ',' << numerics::fmt_g17(field.values[i])
        << '\n';
  }
}

Field read_field_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty field CSV '" + path + "'");
  std::vector<double> xs, us;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string sx, su;
    if (!std::getline(row, sx, ',') || !std::getline(row, su)) {
      throw ConfigError("malformed field CSV row in '" + path + "'");
    }
    xs.push_back(std::stod(sx));
    us.push_back(std::stod(su));
  }
  if (xs.size() < 2) throw ConfigError("field CSV '" + path + "' has too few rows");
  Grid g;
  g.dx = xs[1] - xs[0];
  g.n = Eigen::Index(xs.size());
  Eigen::ArrayXd v = Eigen::Map<Eigen::ArrayXd>(us.data(), Eigen::Index(us.size()));
  return Field(g, std::move(v));
}

} // namespace rdlab
