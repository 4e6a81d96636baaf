#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"

#include "blas_guard.hpp"

int main(int argc, char** argv) {
  pairloc::ensure_working_eigensolver(argv);
  doctest::Context context(argc, argv);
  return context.run();
}
