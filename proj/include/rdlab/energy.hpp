#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rdlab/field.hpp"
#include "rdlab/nonlin.hpp"

namespace rdlab {

struct Trajectory;       // evolve.hpp
struct MovingTrajectory; // evolve.hpp

/// What to measure along a run.
struct EnergyProbe {
  bool wants_E = true;
  std::vector<double> c_list; // weights for Phi_c, all > 0
};

/// 16 log-spaced weights in [0.01, 2 c_dagger_estimate].
std::vector<double> default_c_grid(double c_dagger_estimate);

/// E[u] = int ( u_x^2 / 2 + V(u) ) dx over the reflected line.
double energy(const Field& field, const Nonlinearity& n);
double energy(const LineField& lf, const Nonlinearity& n);

/// Phi_c[u] = int e^{cx} ( u_x^2 / 2 + V(u) ) dx. Throws NumericError when
/// the field fails the weighted-class guard (tail of the integrand not
/// negligible at the domain edge, or c L beyond the overflow guard).
double phi_c(const Field& field, const Nonlinearity& n, double c);
double phi_c(const LineField& lf, const Nonlinearity& n, double c);

/// Guard-checked variant: empty when the field is not in the c-weighted class.
std::optional<double> try_phi_c(const Field& field, const Nonlinearity& n, double c);
std::optional<double> try_phi_c(const LineField& lf, const Nonlinearity& n, double c);

/// Worst relative mismatch between energy drops and the time-integrated
/// dissipation over recorded intervals:
///   max_k |dE_k + I_k| / (|dE_k| + eps),
/// I_k the trapezoid of ||u_t||_{L^2}^2 between records.
double dissipation_residual(const Trajectory& traj, const Nonlinearity& n);

/// Same bookkeeping for a moving-frame run with the e^{cx} weight.
double dissipation_residual_weighted(const MovingTrajectory& traj, const Nonlinearity& n,
                                     double c);

struct WaveLikeCertificate {
  double c = 0.0;
  double time = 0.0;
  double phi_value = 0.0; // Phi_c at the certificate time (negative)
  double delta0 = 0.0;    // largest sampled delta0 with V(u) >= -c^2 u^2 / 8 below it
};

/// First (c, T) over recorded snapshots with the data in L^2_c and
/// Phi_c[u(.,T)] < 0; empty when no weight in the grid certifies.
std::optional<WaveLikeCertificate> is_wave_like(const Trajectory& traj, const Nonlinearity& n,
                                                const std::vector<double>& c_grid);

/// Largest delta0 on a sampling grid with V(u) >= -c^2 u^2 / 8 on [0, delta0].
double largest_delta0(const Nonlinearity& n, double c, int samples = 2000);

/// 2 sqrt(M) (E[u(.,T)] - E_inf)^{1/4} with E_inf the final recorded energy
/// and M the recorded regularity bound. Throws NumericError when the energy
/// series exits below `floor` (the estimate does not apply).
double holder_constant(const Trajectory& traj, double T, double floor = -1e3);

struct EnergyReport {
  std::vector<std::pair<double, double>> E_series; // (t, E)
  std::vector<double> c_list;
  std::vector<std::vector<double>> phi_series; // one series per c
  double dissipation_residual = 0.0;
  double E_inf_estimate = 0.0; // trailing energy value
  double holder_constant = 0.0;
};

EnergyReport make_energy_report(const Trajectory& traj, const Nonlinearity& n);

/// Energy CSV: t, E, one Phi column per c, residual.
void write_energy_csv(const std::string& path, const EnergyReport& report);

} // namespace rdlab
