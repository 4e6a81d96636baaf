#pragma once

#include <cstdlib>
#include <iostream>

#include <unistd.h>

#include "pairloc/spectrum.hpp"

namespace pairloc {

// Re-execs the process with OPENBLAS_CORETYPE pinned when the eigensolver
// self-test fails (OpenBLAS 0.3.20 Cooperlake kernels on AVX-512 CPUs).
inline void ensure_working_eigensolver(char** argv) {
  if (eigensolver_self_test()) return;
  if (std::getenv("OPENBLAS_CORETYPE") == nullptr) {
    const char* core = __builtin_cpu_supports("avx512f") ? "SkylakeX" : "Haswell";
    ::setenv("OPENBLAS_CORETYPE", core, 1);
    ::execv("/proc/self/exe", argv);
  }
  std::cerr << "error: the linked LAPACK returns inaccurate eigenvectors; "
               "try setting OPENBLAS_CORETYPE (e.g. Haswell)\n";
  std::exit(3);
}

}  // namespace pairloc
