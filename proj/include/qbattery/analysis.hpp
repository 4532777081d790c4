#pragma once

// Parameter sweeps, ground-state phase diagrams, the mean-field critical
// interaction, power-law scaling fits over N and photon-cutoff audits.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qbattery/dynamics.hpp"
#include "qbattery/model.hpp"

namespace qbattery {

enum class SweepParameter { g, eta, omega_drive, n_tls };
enum class SweepQuantity { e_max, p_max, sigma_bar, gs_sz };

std::string_view to_string(SweepParameter p);
std::string_view to_string(SweepQuantity q);
SweepParameter sweep_parameter_from_string(std::string_view s);
SweepQuantity sweep_quantity_from_string(std::string_view s);

/// Copy of `base` with one parameter replaced. n_tls values must be integral.
ModelParams with_parameter(ModelParams base, SweepParameter p, double value);

struct SweepAxis {
  SweepParameter parameter = SweepParameter::g;
  std::vector<double> values;  // sorted ascending
};

struct SweepCell {
  double value = 0.0;
  bool ok = false;
  bool flagged = false;  // horizon warning or degenerate ground state
  std::string error;
};

struct SweepGrid {
  SweepAxis axis1;
  SweepAxis axis2;
  SweepQuantity quantity = SweepQuantity::e_max;
  ModelParams base;
  std::vector<SweepCell> cells;  // axis1-major: cells[i * axis2.size() + j]

  const SweepCell& at(std::size_t i, std::size_t j) const {
    return cells[i * axis2.values.size() + j];
  }
  std::size_t failed_cells() const;
};

/// Runs `count` independent jobs on up to `threads` workers; job k writes
/// only its own result slot, so output is identical to sequential execution.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& job);

/// Thread count from `requested` (if > 0), else QB_THREADS, else 1.
int resolve_threads(int requested);

/// Each cell is find_extrema (or ground_state_sz) at that parameter point.
/// Cell failures are recorded in the cell and never abort the sweep.
SweepGrid sweep(const ModelParams& base, const SweepAxis& axis1, const SweepAxis& axis2,
                SweepQuantity quantity, const ChargingProtocol& protocol, int threads = 1);

struct GroundStateReport {
  double sz_ratio = 0.0;  // <J_z> / (N/2) in the lowest eigenvector of H
  double gap = 0.0;       // E_1 - E_0
  bool degenerate = false;
};

inline constexpr double kDegeneracyGap = 1e-10;

GroundStateReport ground_state_sz(const ModelParams& params);

/// w_a - 4 g^2 N / w_c
double critical_eta(double g, int n_tls, double omega_a, double omega_c);

struct ScalingPoint {
  int n = 1;
  double p_max = 0.0;
};

struct ScalingFit {
  std::vector<int> n_values;
  std::vector<double> p_max_values;
  double alpha = 0.0;
  double beta = 0.0;  // exp(intercept) of ln P = alpha ln N + ln beta
  /// exp(c10) where c10 is the intercept of the base-10 regression
  /// log10 P = alpha log10 N + c10, i.e. beta^(1 / ln 10). Tabulated
  /// prefactors in the literature for this model follow this convention.
  double beta_log10_intercept = 0.0;
  double residual = 0.0;  // RMS of natural-log residuals
};

/// Ordinary least squares of ln P against ln N. Needs >= 3 points with
/// strictly increasing N >= 1 and P > 0.
ScalingFit fit_power_scaling(std::span<const ScalingPoint> points);

struct ScalingRun {
  std::vector<ExtremumReport> reports;  // one per N
  ScalingFit fit;                       // on P_max / g (units g w_a^2)
};

/// find_extrema for every N in `n_values` (other parameters from `base`),
/// then a power-law fit of P_max normalised by g.
ScalingRun power_scaling(const ModelParams& base, std::span<const int> n_values,
                         const ChargingProtocol& protocol, int threads = 1);

struct ConvergenceRow {
  int factor = 0;
  double e_max = 0.0;
  double p_max = 0.0;
  double delta_e = 0.0;  // |e_max - previous row's e_max|, 0 for the first row
  double delta_p = 0.0;
};

std::vector<ConvergenceRow> cutoff_convergence(const ModelParams& params,
                                               std::span<const int> factors,
                                               const ChargingProtocol& protocol,
                                               std::size_t max_dim = kDefaultMaxDim);

struct PhaseBoundaryEstimate {
  double g = 0.0;
  double eta_critical = 0.0;  // critical_eta
  double jump_lo = 0.0;       // grid cell with the largest |ratio| change
  double jump_hi = 0.0;
  double jump = 0.0;
  /// Distance from eta_critical to the cell [jump_lo, jump_hi] (0 inside).
  double distance() const;
};

/// Ground-state |<J_z>|/(N/2) along `etas` (ascending) at fixed g, and the
/// grid cell with the largest adjacent change.
PhaseBoundaryEstimate locate_phase_boundary(const ModelParams& base, std::span<const double> etas,
                                            std::vector<double>* ratios = nullptr);

}  // namespace qbattery
