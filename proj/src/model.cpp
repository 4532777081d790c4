#include "qbattery/model.hpp"

#include <algorithm>
#include <cmath>

#include "qbattery/error.hpp"

namespace qbattery {

std::string_view to_string(DriveCoupling c) {
  switch (c) {
    case DriveCoupling::ladder_sum:
      return "ladder_sum";
    case DriveCoupling::collective_x:
      return "collective_x";
  }
  return "ladder_sum";
}

DriveCoupling drive_coupling_from_string(std::string_view s) {
  if (s == "ladder_sum") return DriveCoupling::ladder_sum;
  if (s == "collective_x") return DriveCoupling::collective_x;
  throw InvalidArgument("unknown drive coupling '" + std::string(s) +
                        "' (expected ladder_sum or collective_x)");
}

void ModelParams::validate() const {
  if (!(omega_a > 0.0) || !std::isfinite(omega_a)) {
    throw InvalidArgument("omega_a must be positive and finite");
  }
  if (!(omega_c > 0.0) || !std::isfinite(omega_c)) {
    throw InvalidArgument("omega_c must be positive and finite");
  }
  if (!std::isfinite(g) || g < 0.0) throw InvalidArgument("g must be finite and >= 0");
  if (!std::isfinite(eta)) throw InvalidArgument("eta must be finite");
  if (!std::isfinite(omega_drive)) throw InvalidArgument("omega_drive must be finite");
  if (n_tls < 1) throw InvalidArgument("n_tls must be >= 1");
  if (cutoff_factor < 1) throw InvalidArgument("cutoff_factor must be >= 1");
}

double ModelParams::drive_jx_coefficient() const {
  return drive == DriveCoupling::ladder_sum ? 2.0 * omega_drive : omega_drive;
}

void ChargingProtocol::validate() const {
  if (search_horizon && (!(*search_horizon > 0.0) || !std::isfinite(*search_horizon))) {
    throw InvalidArgument("search horizon must be positive and finite");
  }
  if (coarse_points < 100) throw InvalidArgument("coarse_points must be >= 100");
  if (!(refine_tolerance > 0.0)) throw InvalidArgument("refine_tolerance must be positive");
}

double ChargingProtocol::horizon_for(const ModelParams& params) const {
  return search_horizon ? *search_horizon : default_horizon(params);
}

double default_horizon(const ModelParams& params) {
  constexpr double kLo = 10.0;
  constexpr double kHi = 1000.0;
  if (params.g <= 0.0) return kHi;
  const double t = 3.8 / (params.g * std::sqrt(static_cast<double>(params.n_tls)) * params.omega_a);
  return std::clamp(t, kLo, kHi);
}

HilbertSpace space_for(const ModelParams& params, std::size_t max_dim) {
  params.validate();
  return build_space(params.n_tls, params.cutoff_factor, max_dim);
}

namespace {

void require_consistent(const ModelParams& params, const HilbertSpace& space) {
  params.validate();
  if (space.n_tls() != params.n_tls || space.n_ph_max() != params.cutoff_factor * params.n_tls) {
    throw InvalidArgument("Hilbert space (N=" + std::to_string(space.n_tls()) + ", N_ph=" +
                          std::to_string(space.n_ph_max()) + ") does not match parameters (N=" +
                          std::to_string(params.n_tls) + ", cutoff factor " +
                          std::to_string(params.cutoff_factor) + ")");
  }
}

}  // namespace

OperatorMatrix build_h0(const ModelParams& params, const HilbertSpace& space) {
  require_consistent(params, space);
  return params.omega_a * op_jz(space);
}

OperatorMatrix build_h1(const ModelParams& params, const HilbertSpace& space) {
  require_consistent(params, space);
  // Products are taken on the single-mode factors and then embedded; every
  // term is a photon (x) spin product so this equals the full-space product.
  const int nph = space.n_ph_max();
  const int n = space.n_tls();
  const Eigen::MatrixXd a = factor::photon_annihilate(nph);
  const Eigen::MatrixXd a_dag = a.transpose();
  const Eigen::MatrixXd jx = factor::spin_jx(n);
  const Eigen::MatrixXd jz = factor::spin_jz(n);
  const Eigen::MatrixXd id_ph = Eigen::MatrixXd::Identity(space.photon_dim(), space.photon_dim());
  const Eigen::MatrixXd id_spin = Eigen::MatrixXd::Identity(space.spin_dim(), space.spin_dim());

  const OperatorMatrix cavity = embed(space, a_dag * a, id_spin);
  const OperatorMatrix coupling = embed(space, a_dag + a, jx);
  const OperatorMatrix spin = embed(
      space, id_ph, (params.eta / n) * (jz * jz) + params.drive_jx_coefficient() * jx);
  return params.omega_c * cavity + (2.0 * params.omega_c * params.g) * coupling + spin;
}

OperatorMatrix build_h_total(const ModelParams& params, const HilbertSpace& space) {
  return build_h0(params, space) + build_h1(params, space);
}

double explicit_element(const ModelParams& params, int n_out, int q_out, int n_in, int q_in) {
  const double j = 0.5 * params.n_tls;
  const double m = j - q_in;
  const double jj = j * (j + 1.0);
  const double k = n_in;
  // f1: J_- step (q -> q+1), f2: J_+ step (q -> q-1); f3..f6 add a photon
  // (k+1) or remove one (k). f6 pairs with J_+ and carries m(m+1).
  const double f1 = std::sqrt(std::max(0.0, jj - m * (m - 1.0)));
  const double f2 = std::sqrt(std::max(0.0, jj - m * (m + 1.0)));
  const double f3 = std::sqrt(std::max(0.0, (k + 1.0) * (jj - m * (m - 1.0))));
  const double f4 = std::sqrt(std::max(0.0, (k + 1.0) * (jj - m * (m + 1.0))));
  const double f5 = std::sqrt(std::max(0.0, k * (jj - m * (m - 1.0))));
  const double f6 = std::sqrt(std::max(0.0, k * (jj - m * (m + 1.0))));
  // Omega multiplies (J_+ + J_-); collective_x halves it.
  const double drive = params.drive == DriveCoupling::ladder_sum ? params.omega_drive
                                                                  : 0.5 * params.omega_drive;
  const double coupling = params.omega_c * params.g;

  double h = 0.0;
  if (n_out == n_in && q_out == q_in) {
    h += params.omega_c * n_in + params.omega_a * m + (params.eta / params.n_tls) * m * m;
  }
  if (n_out == n_in && q_out == q_in + 1) h += drive * f1;
  if (n_out == n_in && q_out == q_in - 1) h += drive * f2;
  if (n_out == n_in + 1 && q_out == q_in + 1) h += coupling * f3;
  if (n_out == n_in + 1 && q_out == q_in - 1) h += coupling * f4;
  if (n_out == n_in - 1 && q_out == q_in + 1) h += coupling * f5;
  if (n_out == n_in - 1 && q_out == q_in - 1) h += coupling * f6;
  return h;
}

double explicit_formula_deviation(const ModelParams& params, const HilbertSpace& space) {
  const OperatorMatrix h = build_h_total(params, space);
  double worst = 0.0;
  for (std::size_t col = 0; col < space.dim(); ++col) {
    const BasisLabel in = space.state_of(col);
    const int q_in = static_cast<int>(std::lround(space.j() - in.m));
    for (std::size_t row = 0; row < space.dim(); ++row) {
      const BasisLabel out = space.state_of(row);
      const int q_out = static_cast<int>(std::lround(space.j() - out.m));
      const double expected = explicit_element(params, out.photons, q_out, in.photons, q_in);
      worst = std::max(worst, std::abs(expected - h(row, col)));
    }
  }
  return worst;
}

}  // namespace qbattery
