#pragma once

namespace qbattery {

/// Solves a fixed 160x160 symmetric problem with the linked LAPACK and checks
/// the reconstruction. Result is computed once per process.
bool eigensolver_self_check();

/// For executables: if the self-check fails and OPENBLAS_CORETYPE is unset,
/// re-executes the current binary with OPENBLAS_CORETYPE=Haswell (OpenBLAS
/// 0.3.20 selects faulty Cooperlake kernels on some AVX512-FP16 parts).
/// Returns only if no re-exec happened.
void ensure_working_blas(char** argv);

}  // namespace qbattery
