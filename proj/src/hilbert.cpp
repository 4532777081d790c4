#include "qbattery/hilbert.hpp"

#include <cmath>
#include <string>

#include "qbattery/error.hpp"

namespace qbattery {

HilbertSpace::HilbertSpace(int n_tls, int n_ph_max, std::size_t max_dim)
    : n_tls_(n_tls), n_ph_max_(n_ph_max) {
  if (n_tls < 1) {
    throw InvalidArgument("number of two-level systems must be >= 1, got " +
                          std::to_string(n_tls));
  }
  if (n_ph_max < n_tls) {
    throw InvalidArgument("photon cutoff " + std::to_string(n_ph_max) +
                          " is below the initial photon number " + std::to_string(n_tls));
  }
  if (dim() > max_dim) {
    throw ResourceLimit("Hilbert space dimension " + std::to_string(dim()) +
                        " exceeds the guard of " + std::to_string(max_dim) +
                        " (lower N or the cutoff factor, or raise the guard)");
  }
}

std::size_t HilbertSpace::index_of(int n, double m) const {
  if (n < 0 || n > n_ph_max_) {
    throw InvalidArgument("photon number " + std::to_string(n) + " outside [0, " +
                          std::to_string(n_ph_max_) + "]");
  }
  const double k = m + j();
  const double k_rounded = std::round(k);
  if (std::abs(k - k_rounded) > 1e-9 || k_rounded < 0 || k_rounded > n_tls_) {
    throw InvalidArgument("spin projection m = " + std::to_string(m) +
                          " is not on the grid -j..j for j = " + std::to_string(j()));
  }
  return static_cast<std::size_t>(n) * static_cast<std::size_t>(spin_dim()) +
         static_cast<std::size_t>(k_rounded);
}

BasisLabel HilbertSpace::state_of(std::size_t index) const {
  if (index >= dim()) {
    throw InvalidArgument("basis index " + std::to_string(index) + " outside [0, " +
                          std::to_string(dim()) + ")");
  }
  const auto sd = static_cast<std::size_t>(spin_dim());
  return {static_cast<int>(index / sd), static_cast<double>(index % sd) - j()};
}

HilbertSpace build_space(int n_tls, int cutoff_factor, std::size_t max_dim) {
  if (cutoff_factor < 1) {
    throw InvalidArgument("cutoff factor must be >= 1, got " + std::to_string(cutoff_factor));
  }
  if (n_tls < 1) {
    throw InvalidArgument("number of two-level systems must be >= 1, got " +
                          std::to_string(n_tls));
  }
  return HilbertSpace(n_tls, cutoff_factor * n_tls, max_dim);
}

OperatorMatrix::OperatorMatrix(HilbertSpace space, Eigen::MatrixXd elements)
    : space_(space), elements_(std::move(elements)) {
  const auto d = static_cast<Eigen::Index>(space_.dim());
  if (elements_.rows() != d || elements_.cols() != d) {
    throw InvalidArgument("operator is " + std::to_string(elements_.rows()) + "x" +
                          std::to_string(elements_.cols()) + " but the space has dimension " +
                          std::to_string(d));
  }
}

OperatorMatrix OperatorMatrix::transpose() const {
  return OperatorMatrix(space_, elements_.transpose());
}

double OperatorMatrix::max_asymmetry() const {
  return (elements_ - elements_.transpose()).cwiseAbs().maxCoeff();
}

namespace {

void require_same_space(const OperatorMatrix& a, const OperatorMatrix& b) {
  if (!(a.space() == b.space())) {
    throw InvalidArgument("operators live on different Hilbert spaces");
  }
}

}  // namespace

OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_space(a, b);
  return OperatorMatrix(a.space_, a.elements_ + b.elements_);
}

OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_space(a, b);
  return OperatorMatrix(a.space_, a.elements_ - b.elements_);
}

OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_space(a, b);
  return OperatorMatrix(a.space_, a.elements_ * b.elements_);
}

OperatorMatrix operator*(double s, const OperatorMatrix& a) {
  return OperatorMatrix(a.space_, s * a.elements_);
}

OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b) {
  return a * b - b * a;
}

double max_abs(const OperatorMatrix& a) { return a.elements().cwiseAbs().maxCoeff(); }

namespace factor {

Eigen::MatrixXd photon_annihilate(int n_ph_max) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_ph_max + 1, n_ph_max + 1);
  for (int n = 1; n <= n_ph_max; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

Eigen::MatrixXd photon_number(int n_ph_max) {
  Eigen::VectorXd n = Eigen::VectorXd::LinSpaced(n_ph_max + 1, 0.0, n_ph_max);
  return n.asDiagonal();
}

Eigen::MatrixXd spin_jz(int n_tls) {
  const double j = 0.5 * n_tls;
  Eigen::VectorXd m = Eigen::VectorXd::LinSpaced(n_tls + 1, -j, j);
  return m.asDiagonal();
}

// <m+1|J_+|m> = sqrt(j(j+1) - m(m+1)); column k = m + j maps to row k + 1.
Eigen::MatrixXd spin_jplus(int n_tls) {
  const double j = 0.5 * n_tls;
  Eigen::MatrixXd jp = Eigen::MatrixXd::Zero(n_tls + 1, n_tls + 1);
  for (int k = 0; k < n_tls; ++k) {
    const double m = k - j;
    jp(k + 1, k) = std::sqrt(j * (j + 1) - m * (m + 1));
  }
  return jp;
}

Eigen::MatrixXd spin_jminus(int n_tls) { return spin_jplus(n_tls).transpose(); }

Eigen::MatrixXd spin_jx(int n_tls) {
  const Eigen::MatrixXd jp = spin_jplus(n_tls);
  return 0.5 * (jp + jp.transpose());
}

}  // namespace factor

OperatorMatrix embed(const HilbertSpace& space, const Eigen::MatrixXd& photon_factor,
                     const Eigen::MatrixXd& spin_factor) {
  const Eigen::Index pd = space.photon_dim();
  const Eigen::Index sd = space.spin_dim();
  if (photon_factor.rows() != pd || photon_factor.cols() != pd || spin_factor.rows() != sd ||
      spin_factor.cols() != sd) {
    throw InvalidArgument("factor dimensions do not match the Hilbert space");
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(pd * sd, pd * sd);
  for (Eigen::Index c = 0; c < pd; ++c) {
    for (Eigen::Index r = 0; r < pd; ++r) {
      const double a = photon_factor(r, c);
      if (a != 0.0) out.block(r * sd, c * sd, sd, sd) = a * spin_factor;
    }
  }
  return OperatorMatrix(space, std::move(out));
}

namespace {

Eigen::MatrixXd photon_identity(const HilbertSpace& s) {
  return Eigen::MatrixXd::Identity(s.photon_dim(), s.photon_dim());
}

Eigen::MatrixXd spin_identity(const HilbertSpace& s) {
  return Eigen::MatrixXd::Identity(s.spin_dim(), s.spin_dim());
}

}  // namespace

OperatorMatrix op_identity(const HilbertSpace& space) {
  return OperatorMatrix(space, Eigen::MatrixXd::Identity(space.dim(), space.dim()));
}

OperatorMatrix op_annihilate(const HilbertSpace& space) {
  return embed(space, factor::photon_annihilate(space.n_ph_max()), spin_identity(space));
}

OperatorMatrix op_create(const HilbertSpace& space) { return op_annihilate(space).transpose(); }

OperatorMatrix op_number(const HilbertSpace& space) {
  return embed(space, factor::photon_number(space.n_ph_max()), spin_identity(space));
}

OperatorMatrix op_jz(const HilbertSpace& space) {
  return embed(space, photon_identity(space), factor::spin_jz(space.n_tls()));
}

OperatorMatrix op_jplus(const HilbertSpace& space) {
  return embed(space, photon_identity(space), factor::spin_jplus(space.n_tls()));
}

OperatorMatrix op_jminus(const HilbertSpace& space) {
  return embed(space, photon_identity(space), factor::spin_jminus(space.n_tls()));
}

OperatorMatrix op_jx(const HilbertSpace& space) {
  return embed(space, photon_identity(space), factor::spin_jx(space.n_tls()));
}

OperatorMatrix op_jsquared(const HilbertSpace& space) {
  const Eigen::MatrixXd jz = factor::spin_jz(space.n_tls());
  const Eigen::MatrixXd jp = factor::spin_jplus(space.n_tls());
  const Eigen::MatrixXd jm = factor::spin_jminus(space.n_tls());
  const Eigen::MatrixXd j2 = jz * jz + 0.5 * (jp * jm + jm * jp);
  return embed(space, photon_identity(space), j2);
}

}  // namespace qbattery
