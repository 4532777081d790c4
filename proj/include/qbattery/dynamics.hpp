#pragma once

// Exact unitary charging dynamics from |N photons> (x) |j, -j> under the
// static Hamiltonian H = H0 + H1, evaluated through one spectral
// decomposition so that every observable is available at arbitrary t.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qbattery/hilbert.hpp"
#include "qbattery/model.hpp"

namespace qbattery {

struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // orthonormal columns

  Eigen::Index size() const { return eigenvalues.size(); }
  Eigen::MatrixXd reconstruct() const;
};

/// Full eigendecomposition of a real symmetric matrix (LAPACK dsyevd).
/// Throws NumericalError on non-finite input or solver failure.
SpectralDecomposition decompose(const Eigen::MatrixXd& symmetric);
SpectralDecomposition decompose(const OperatorMatrix& h);

/// The `count` lowest eigenpairs of a real symmetric matrix (LAPACK dsyevr).
SpectralDecomposition lowest_eigenpairs(const Eigen::MatrixXd& symmetric, int count);

struct QuantumState {
  Eigen::VectorXcd amplitudes;

  double norm() const { return amplitudes.norm(); }
};

/// |n = N> (x) |j, m = -j>. Throws InvalidArgument if the cutoff is below N.
QuantumState initial_state(const HilbertSpace& space);

/// V exp(-i diag(lambda) t) V^T psi0.
QuantumState evolve(const SpectralDecomposition& decomposition, const QuantumState& psi0,
                    double t);

/// Real expectation value <psi|A|psi>. Throws NumericalError if the imaginary
/// residue exceeds 1e-10 (relative to max(1, |A|_max)).
double expectation(const OperatorMatrix& op, const QuantumState& psi);

/// <psi(t)|H0|psi(t)> - <psi(0)|H0|psi(0)>
double stored_energy(const QuantumState& psi_t, const QuantumState& psi0, const OperatorMatrix& h0);

/// E / t, and 0 at t = 0.
double charging_power(double energy, double t);

/// |sd_t(H0) - sd_0(H0)| where sd is the standard deviation. Variances below
/// -1e-10 raise NumericalError, smaller negatives are clamped to zero.
double energy_fluctuation(const QuantumState& psi_t, const QuantumState& psi0,
                          const OperatorMatrix& h0);

/// Basis indices connected to `seed` through nonzero elements of `h`, sorted.
std::vector<Eigen::Index> reachable_indices(const Eigen::MatrixXd& h, Eigen::Index seed);

struct Observables {
  double t = 0.0;
  double energy = 0.0;       // w_a
  double power = 0.0;        // w_a^2
  double fluctuation = 0.0;  // w_a
  double sz_ratio = 0.0;     // <J_z> / (N/2)
};

/// One decomposition of the charging Hamiltonian, restricted to the sector
/// reachable from the initial state. Immutable after construction and safe to
/// share between threads.
class ChargingDynamics {
 public:
  explicit ChargingDynamics(const ModelParams& params, std::size_t max_dim = kDefaultMaxDim);

  const ModelParams& params() const { return params_; }
  const HilbertSpace& space() const { return space_; }
  std::size_t sector_dim() const { return sector_.size(); }
  const SpectralDecomposition& sector_decomposition() const { return decomposition_; }

  Observables at(double t) const;
  std::vector<Observables> sample(std::span<const double> times) const;
  /// psi(t) embedded in the full Hilbert space.
  QuantumState state(double t) const;

 private:
  Observables observe(double t, const Eigen::VectorXd& probabilities) const;

  ModelParams params_;
  HilbertSpace space_;
  std::vector<Eigen::Index> sector_;
  SpectralDecomposition decomposition_;
  Eigen::VectorXd overlap_;  // V^T psi0 within the sector
  Eigen::VectorXd jz_;       // J_z diagonal on the sector
  Eigen::VectorXd p0_;       // |psi0|^2 on the sector
  double jz0_ = 0.0;
  double sd0_ = 0.0;
};

struct ChargingTrace {
  std::vector<double> times;
  std::vector<double> energy;
  std::vector<double> power;
  std::vector<double> fluctuation;
  std::vector<double> sz;
  ModelParams params;
  double horizon = 0.0;
  std::vector<std::string> warnings;
};

struct ExtremumReport {
  double e_max = 0.0;
  double t_e = 0.0;
  double p_max = 0.0;
  double t_p = 0.0;
  double sigma_bar = 0.0;
  double horizon = 0.0;
  bool horizon_warning = false;
  std::vector<std::string> warnings;
};

/// t_k = k T / coarse_points for k = 0..coarse_points.
std::vector<double> time_grid(double horizon, int coarse_points);

ChargingTrace trace(const ChargingDynamics& dynamics, const ChargingProtocol& protocol);
ChargingTrace trace(const ModelParams& params, const ChargingProtocol& protocol);

/// Global maxima of E(t) and P(t) over (0, T]: coarse scan, then golden-section
/// refinement on the bracketing grid cells. sigma_bar = Sigma(t_E).
ExtremumReport find_extrema(const ChargingDynamics& dynamics, const ChargingProtocol& protocol);
ExtremumReport find_extrema(const ModelParams& params, const ChargingProtocol& protocol);

}  // namespace qbattery
