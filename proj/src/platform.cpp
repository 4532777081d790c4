#include "qbattery/platform.hpp"

#include <unistd.h>

#include <cstdio>
#include <cstdlib>

#include <Eigen/Dense>
#include <lapacke.h>

namespace qbattery {

namespace {

bool run_check() {
  constexpr int n = 160;
  Eigen::MatrixXd a(n, n);
  for (int c = 0; c < n; ++c) {
    for (int r = 0; r < n; ++r) a(r, c) = 1.0 / (1.0 + r + c) + (r == c ? 0.01 * r : 0.0);
  }
  Eigen::MatrixXd v = a;
  Eigen::VectorXd w(n);
  if (LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, v.data(), n, w.data()) != 0) return false;
  const double err = (v * w.asDiagonal() * v.transpose() - a).cwiseAbs().maxCoeff();
  return err < 1e-10;
}

}  // namespace

bool eigensolver_self_check() {
  static const bool ok = run_check();
  return ok;
}

void ensure_working_blas(char** argv) {
  if (eigensolver_self_check() || std::getenv("OPENBLAS_CORETYPE") != nullptr) return;
  setenv("OPENBLAS_CORETYPE", "Haswell", 1);
  execv("/proc/self/exe", argv);
  std::perror("re-exec with OPENBLAS_CORETYPE=Haswell failed");
}

}  // namespace qbattery
