#pragma once

// Truncated photon (x) collective-spin basis |n> (x) |j = N/2, m> and the
// elementary ladder operators acting on it.
//
// Basis ordering is frozen: the photon number n is the outer index and the
// spin label k = m + j (ascending m) is the inner index, so
//
//     index = n * (N + 1) + (m + j).
//
// (n = 0, m = -j) is index 0 and (n = n_ph_max, m = +j) is index dim - 1.
// All operators have real matrix elements in this basis and are stored densely.

#include <cstddef>

#include <Eigen/Dense>

namespace qbattery {

inline constexpr std::size_t kDefaultMaxDim = 20000;
inline constexpr int kDefaultCutoffFactor = 4;

struct BasisLabel {
  int photons = 0;
  double m = 0.0;  // J_z eigenvalue, half-integer when N is odd

  bool operator==(const BasisLabel&) const = default;
};

class HilbertSpace {
 public:
  /// Throws InvalidArgument for n_tls < 1 or n_ph_max < n_tls and
  /// ResourceLimit when the dimension exceeds `max_dim`.
  HilbertSpace(int n_tls, int n_ph_max, std::size_t max_dim = kDefaultMaxDim);

  int n_tls() const { return n_tls_; }
  int n_ph_max() const { return n_ph_max_; }
  double j() const { return 0.5 * n_tls_; }
  int photon_dim() const { return n_ph_max_ + 1; }
  int spin_dim() const { return n_tls_ + 1; }
  std::size_t dim() const {
    return static_cast<std::size_t>(photon_dim()) * static_cast<std::size_t>(spin_dim());
  }

  /// `m` must lie on the grid {-j, -j+1, ..., +j}.
  std::size_t index_of(int n, double m) const;
  BasisLabel state_of(std::size_t index) const;

  bool operator==(const HilbertSpace& other) const {
    return n_tls_ == other.n_tls_ && n_ph_max_ == other.n_ph_max_;
  }

 private:
  int n_tls_;
  int n_ph_max_;
};

/// Space with photon cutoff n_ph_max = cutoff_factor * n_tls.
HilbertSpace build_space(int n_tls, int cutoff_factor = kDefaultCutoffFactor,
                         std::size_t max_dim = kDefaultMaxDim);

/// Dense real operator on a HilbertSpace. Immutable once built.
class OperatorMatrix {
 public:
  OperatorMatrix(HilbertSpace space, Eigen::MatrixXd elements);

  const HilbertSpace& space() const { return space_; }
  const Eigen::MatrixXd& elements() const { return elements_; }
  std::size_t dim() const { return space_.dim(); }
  double operator()(std::size_t row, std::size_t col) const {
    return elements_(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
  }

  OperatorMatrix transpose() const;
  /// max |A_ij - A_ji|
  double max_asymmetry() const;

  friend OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b);
  friend OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b);
  friend OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b);
  friend OperatorMatrix operator*(double s, const OperatorMatrix& a);

 private:
  HilbertSpace space_;
  Eigen::MatrixXd elements_;
};

/// Commutator [a, b] = ab - ba.
OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b);
/// max_ij |A_ij|
double max_abs(const OperatorMatrix& a);

// Single-mode factors. Photon factors are (n_ph_max+1)^2, spin factors are
// (N+1)^2 in the ascending-m ordering used by HilbertSpace.
namespace factor {

Eigen::MatrixXd photon_annihilate(int n_ph_max);
Eigen::MatrixXd photon_number(int n_ph_max);
Eigen::MatrixXd spin_jz(int n_tls);
Eigen::MatrixXd spin_jplus(int n_tls);
Eigen::MatrixXd spin_jminus(int n_tls);
Eigen::MatrixXd spin_jx(int n_tls);

}  // namespace factor

/// photon_factor (x) spin_factor on `space`.
OperatorMatrix embed(const HilbertSpace& space, const Eigen::MatrixXd& photon_factor,
                     const Eigen::MatrixXd& spin_factor);

OperatorMatrix op_identity(const HilbertSpace& space);
OperatorMatrix op_annihilate(const HilbertSpace& space);
OperatorMatrix op_create(const HilbertSpace& space);
OperatorMatrix op_number(const HilbertSpace& space);
OperatorMatrix op_jz(const HilbertSpace& space);
OperatorMatrix op_jplus(const HilbertSpace& space);
OperatorMatrix op_jminus(const HilbertSpace& space);
OperatorMatrix op_jx(const HilbertSpace& space);
/// J^2 = J_z^2 + (J_+ J_- + J_- J_+) / 2, built from the ladder operators.
OperatorMatrix op_jsquared(const HilbertSpace& space);

}  // namespace qbattery
