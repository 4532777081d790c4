#include "qbattery/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <deque>
#include <string>

#include <cblas.h>
#include <lapacke.h>

#include "qbattery/error.hpp"
#include "qbattery/golden.hpp"
#include "qbattery/platform.hpp"

namespace qbattery {

namespace {

constexpr double kVarianceSlack = 1e-10;
constexpr Eigen::Index kSampleChunk = 128;

void require_finite(const Eigen::MatrixXd& m) {
  if (!m.allFinite()) throw NumericalError("matrix passed to the eigensolver has non-finite entries");
}

void require_square(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw InvalidArgument("eigensolver needs a square matrix");
}

double clamped_sd(double variance) {
  if (variance < -kVarianceSlack) {
    throw NumericalError("negative energy variance " + std::to_string(variance));
  }
  return std::sqrt(std::max(0.0, variance));
}

}  // namespace

Eigen::MatrixXd SpectralDecomposition::reconstruct() const {
  return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.transpose();
}

SpectralDecomposition decompose(const Eigen::MatrixXd& symmetric) {
  require_square(symmetric);
  require_finite(symmetric);
  const auto n = static_cast<lapack_int>(symmetric.rows());
  SpectralDecomposition out;
  out.eigenvectors = symmetric;
  out.eigenvalues.resize(n);
  if (n == 0) return out;
  if (!eigensolver_self_check()) {
    throw NumericalError("linked LAPACK fails its eigensolver self-check; try OPENBLAS_CORETYPE=Haswell");
  }
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, out.eigenvectors.data(),
                                         n, out.eigenvalues.data());
  if (info != 0) {
    throw NumericalError("dsyevd failed with info = " + std::to_string(info));
  }
  return out;
}

SpectralDecomposition decompose(const OperatorMatrix& h) { return decompose(h.elements()); }

SpectralDecomposition lowest_eigenpairs(const Eigen::MatrixXd& symmetric, int count) {
  require_square(symmetric);
  require_finite(symmetric);
  const auto n = static_cast<lapack_int>(symmetric.rows());
  if (count < 1 || count > n) throw InvalidArgument("requested eigenpair count out of range");
  if (!eigensolver_self_check()) {
    throw NumericalError("linked LAPACK fails its eigensolver self-check; try OPENBLAS_CORETYPE=Haswell");
  }
  Eigen::MatrixXd work = symmetric;
  Eigen::VectorXd w(n);
  Eigen::MatrixXd z(n, count);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(count));
  lapack_int found = 0;
  const lapack_int info =
      LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', n, work.data(), n, 0.0, 0.0, 1, count, 0.0,
                     &found, w.data(), z.data(), n, support.data());
  if (info != 0 || found != count) {
    throw NumericalError("dsyevr failed with info = " + std::to_string(info));
  }
  return {w.head(count), z};
}

QuantumState initial_state(const HilbertSpace& space) {
  if (space.n_ph_max() < space.n_tls()) {
    throw InvalidArgument("photon cutoff is below the initial photon number");
  }
  QuantumState psi{Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(space.dim()))};
  psi.amplitudes(static_cast<Eigen::Index>(space.index_of(space.n_tls(), -space.j()))) = 1.0;
  return psi;
}

QuantumState evolve(const SpectralDecomposition& decomposition, const QuantumState& psi0,
                    double t) {
  if (t < 0.0) throw InvalidArgument("evolution time must be >= 0");
  const Eigen::MatrixXd& v = decomposition.eigenvectors;
  Eigen::VectorXcd c = v.transpose().cast<std::complex<double>>() * psi0.amplitudes;
  for (Eigen::Index k = 0; k < c.size(); ++k) {
    c(k) *= std::polar(1.0, -decomposition.eigenvalues(k) * t);
  }
  return {v.cast<std::complex<double>>() * c};
}

double expectation(const OperatorMatrix& op, const QuantumState& psi) {
  const std::complex<double> value =
      psi.amplitudes.dot(op.elements().cast<std::complex<double>>() * psi.amplitudes);
  const double scale = std::max(1.0, max_abs(op));
  if (std::abs(value.imag()) > 1e-10 * scale) {
    throw NumericalError("expectation value has imaginary part " + std::to_string(value.imag()));
  }
  return value.real();
}

double stored_energy(const QuantumState& psi_t, const QuantumState& psi0,
                     const OperatorMatrix& h0) {
  return expectation(h0, psi_t) - expectation(h0, psi0);
}

double charging_power(double energy, double t) {
  if (t < 0.0) throw InvalidArgument("charging time must be >= 0");
  return t == 0.0 ? 0.0 : energy / t;
}

double energy_fluctuation(const QuantumState& psi_t, const QuantumState& psi0,
                          const OperatorMatrix& h0) {
  const OperatorMatrix h0_sq = h0 * h0;
  const auto sd = [&](const QuantumState& psi) {
    const double mean = expectation(h0, psi);
    return clamped_sd(expectation(h0_sq, psi) - mean * mean);
  };
  return std::abs(sd(psi_t) - sd(psi0));
}

std::vector<Eigen::Index> reachable_indices(const Eigen::MatrixXd& h, Eigen::Index seed) {
  require_square(h);
  if (seed < 0 || seed >= h.rows()) throw InvalidArgument("seed index out of range");
  std::vector<char> seen(static_cast<std::size_t>(h.rows()), 0);
  std::deque<Eigen::Index> queue{seed};
  seen[static_cast<std::size_t>(seed)] = 1;
  std::vector<Eigen::Index> out;
  while (!queue.empty()) {
    const Eigen::Index i = queue.front();
    queue.pop_front();
    out.push_back(i);
    for (Eigen::Index r = 0; r < h.rows(); ++r) {
      if (!seen[static_cast<std::size_t>(r)] && (h(r, i) != 0.0 || h(i, r) != 0.0)) {
        seen[static_cast<std::size_t>(r)] = 1;
        queue.push_back(r);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

ChargingDynamics::ChargingDynamics(const ModelParams& params, std::size_t max_dim)
    : params_(params), space_(space_for(params, max_dim)) {
  const Eigen::Index seed =
      static_cast<Eigen::Index>(space_.index_of(space_.n_tls(), -space_.j()));
  Eigen::MatrixXd h_sector;
  {
    const OperatorMatrix h = build_h_total(params_, space_);
    sector_ = reachable_indices(h.elements(), seed);
    const auto d = static_cast<Eigen::Index>(sector_.size());
    h_sector.resize(d, d);
    for (Eigen::Index c = 0; c < d; ++c) {
      for (Eigen::Index r = 0; r < d; ++r) h_sector(r, c) = h.elements()(sector_[r], sector_[c]);
    }
  }
  decomposition_ = decompose(h_sector);

  const auto d = static_cast<Eigen::Index>(sector_.size());
  jz_.resize(d);
  Eigen::VectorXd psi0 = Eigen::VectorXd::Zero(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    const auto idx = static_cast<std::size_t>(sector_[k]);
    jz_(k) = space_.state_of(idx).m;
    if (sector_[k] == seed) psi0(k) = 1.0;
  }
  overlap_ = decomposition_.eigenvectors.transpose() * psi0;
  p0_ = psi0.cwiseAbs2();
  jz0_ = jz_.dot(p0_);
  sd0_ = clamped_sd(jz_.cwiseAbs2().dot(p0_) - jz0_ * jz0_);
}

Observables ChargingDynamics::observe(double t, const Eigen::VectorXd& probabilities) const {
  const double jz = jz_.dot(probabilities);
  const double var = jz_.cwiseAbs2().dot(probabilities) - jz * jz;
  const double wa = params_.omega_a;
  Observables o;
  o.t = t;
  o.energy = wa * (jz - jz0_);
  o.power = charging_power(o.energy, t);
  o.fluctuation = wa * std::abs(clamped_sd(var) - sd0_);
  o.sz_ratio = jz / space_.j();
  return o;
}

Observables ChargingDynamics::at(double t) const {
  const double times[] = {t};
  return sample(times).front();
}

std::vector<Observables> ChargingDynamics::sample(std::span<const double> times) const {
  const Eigen::Index d = decomposition_.size();
  const Eigen::MatrixXd& v = decomposition_.eigenvectors;
  std::vector<Observables> out;
  out.reserve(times.size());
  const auto total = static_cast<Eigen::Index>(times.size());
  for (Eigen::Index start = 0; start < total; start += kSampleChunk) {
    const Eigen::Index count = std::min(kSampleChunk, total - start);
    Eigen::MatrixXd phase_re(d, count);
    Eigen::MatrixXd phase_im(d, count);
    for (Eigen::Index b = 0; b < count; ++b) {
      const double t = times[static_cast<std::size_t>(start + b)];
      if (t < 0.0) throw InvalidArgument("evolution time must be >= 0");
      for (Eigen::Index k = 0; k < d; ++k) {
        const double angle = -decomposition_.eigenvalues(k) * t;
        phase_re(k, b) = overlap_(k) * std::cos(angle);
        phase_im(k, b) = overlap_(k) * std::sin(angle);
      }
    }
    Eigen::MatrixXd psi_re(d, count);
    Eigen::MatrixXd psi_im(d, count);
    const auto n = static_cast<blasint>(d);
    const auto m = static_cast<blasint>(count);
    cblas_dgemm(CblasColMajor, CblasNoTrans, CblasNoTrans, n, m, n, 1.0, v.data(), n,
                phase_re.data(), n, 0.0, psi_re.data(), n);
    cblas_dgemm(CblasColMajor, CblasNoTrans, CblasNoTrans, n, m, n, 1.0, v.data(), n,
                phase_im.data(), n, 0.0, psi_im.data(), n);
    const Eigen::MatrixXd prob = psi_re.cwiseAbs2() + psi_im.cwiseAbs2();
    for (Eigen::Index b = 0; b < count; ++b) {
      const double t = times[static_cast<std::size_t>(start + b)];
      out.push_back(t == 0.0 ? observe(0.0, p0_) : observe(t, prob.col(b)));
    }
  }
  return out;
}

QuantumState ChargingDynamics::state(double t) const {
  if (t < 0.0) throw InvalidArgument("evolution time must be >= 0");
  const Eigen::Index d = decomposition_.size();
  Eigen::VectorXcd c(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    c(k) = overlap_(k) * std::polar(1.0, -decomposition_.eigenvalues(k) * t);
  }
  const Eigen::VectorXcd sector_psi = decomposition_.eigenvectors.cast<std::complex<double>>() * c;
  QuantumState psi{Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(space_.dim()))};
  for (Eigen::Index k = 0; k < d; ++k) psi.amplitudes(sector_[k]) = sector_psi(k);
  return psi;
}

std::vector<double> time_grid(double horizon, int coarse_points) {
  if (!(horizon > 0.0)) throw InvalidArgument("time horizon must be positive");
  if (coarse_points < 1) throw InvalidArgument("time grid needs at least one interval");
  std::vector<double> times(static_cast<std::size_t>(coarse_points) + 1);
  for (int k = 0; k <= coarse_points; ++k) {
    times[static_cast<std::size_t>(k)] = horizon * k / coarse_points;
  }
  return times;
}

ChargingTrace trace(const ChargingDynamics& dynamics, const ChargingProtocol& protocol) {
  protocol.validate();
  ChargingTrace tr;
  tr.params = dynamics.params();
  tr.horizon = protocol.horizon_for(tr.params);
  tr.times = time_grid(tr.horizon, protocol.coarse_points);
  const std::vector<Observables> obs = dynamics.sample(tr.times);
  for (const Observables& o : obs) {
    tr.energy.push_back(o.energy);
    tr.power.push_back(o.power);
    tr.fluctuation.push_back(o.fluctuation);
    tr.sz.push_back(o.sz_ratio);
  }
  if (!tr.params.resonant()) tr.warnings.emplace_back("off-resonance parameters are unvalidated");
  return tr;
}

ChargingTrace trace(const ModelParams& params, const ChargingProtocol& protocol) {
  return trace(ChargingDynamics(params), protocol);
}

namespace {

// Refines a coarse-grid maximum at index `best`; never returns less than the
// coarse value.
template <typename F>
ScalarMaximum refine(F&& f, const std::vector<double>& times, std::size_t best, double coarse,
                     double tolerance) {
  const double lo = times[best == 0 ? 0 : best - 1];
  const double hi = times[std::min(best + 1, times.size() - 1)];
  const ScalarMaximum fine = golden_section_maximize(f, lo, hi, tolerance);
  if (fine.value >= coarse) return fine;
  return {times[best], coarse};
}

}  // namespace

ExtremumReport find_extrema(const ChargingDynamics& dynamics, const ChargingProtocol& protocol) {
  protocol.validate();
  const ModelParams& params = dynamics.params();
  ExtremumReport rep;
  rep.horizon = protocol.horizon_for(params);
  const std::vector<double> times = time_grid(rep.horizon, protocol.coarse_points);
  const std::vector<Observables> obs = dynamics.sample(times);

  std::size_t best_e = 1;
  std::size_t best_p = 1;
  for (std::size_t k = 1; k < obs.size(); ++k) {
    if (obs[k].energy > obs[best_e].energy) best_e = k;
    if (obs[k].power > obs[best_p].power) best_p = k;
  }

  const ScalarMaximum e = refine([&](double t) { return dynamics.at(t).energy; }, times, best_e,
                                 obs[best_e].energy, protocol.refine_tolerance);
  const ScalarMaximum p = refine([&](double t) { return dynamics.at(t).power; }, times, best_p,
                                 obs[best_p].power, protocol.refine_tolerance);
  rep.e_max = e.value;
  rep.t_e = e.x;
  rep.p_max = p.value;
  rep.t_p = p.x;
  rep.sigma_bar = dynamics.at(rep.t_e).fluctuation;

  if (best_e == obs.size() - 1) {
    rep.horizon_warning = true;
    rep.warnings.emplace_back("maximum of E(t) lies on the search horizon; increase it");
  }
  if (best_p == obs.size() - 1) {
    rep.horizon_warning = true;
    rep.warnings.emplace_back("maximum of P(t) lies on the search horizon; increase it");
  }
  if (!params.resonant()) rep.warnings.emplace_back("off-resonance parameters are unvalidated");
  return rep;
}

ExtremumReport find_extrema(const ModelParams& params, const ChargingProtocol& protocol) {
  return find_extrema(ChargingDynamics(params), protocol);
}

}  // namespace qbattery
