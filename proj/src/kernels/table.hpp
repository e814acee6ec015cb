#pragma once

#include <cstddef>

#include "sparec/kernels.hpp"

namespace sparec::kern::detail {

struct OpsTable {
  void (*abs2)(const cplx*, double*, std::size_t);
  cplx (*dot)(const cplx*, const cplx*, std::size_t);
  cplx (*wdot)(const cplx*, const cplx*, const double*, std::size_t);
  void (*axpy)(cplx, const cplx*, cplx*, std::size_t);
  double (*wsum_powh)(const double*, const double*, std::size_t, double);
  void (*powh_weights)(const double*, const double*, double, double*, std::size_t);
  double (*max_abs2)(const cplx*, std::size_t);
};

extern const OpsTable scalar_table;

// nullptr when the host lacks AVX2+FMA (or on non-x86 builds)
const OpsTable* avx2_table();

// Non-half-integer exponents share one scalar pow() path across backends.
bool powh_fast_path(double h);
double wsum_powh_general(const double* t, const double* w, std::size_t n, double h);
void powh_weights_general(const double* t, const double* w, double h, double* out, std::size_t n);

}  // namespace sparec::kern::detail
