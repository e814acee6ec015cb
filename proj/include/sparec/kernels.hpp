#pragma once

#include <complex>
#include <cstddef>

namespace sparec::kern {

using cplx = std::complex<double>;

/// The arithmetic inner loops (norm accumulation, complex dot products,
/// residual updates) exist in a scalar reference version and an AVX2 version.
/// The best supported backend is selected once at startup; tests pin either
/// one explicitly and check equivalence. SPAREC_KERNELS=scalar|avx2 overrides
/// the startup choice.
enum class Backend { scalar, avx2 };

Backend active_backend();
bool backend_supported(Backend b);
bool set_backend(Backend b);  // false (and no change) if unsupported
const char* backend_name(Backend b);

/// out[i] = |x[i]|^2
void abs2(const cplx* x, double* out, std::size_t n);

/// sum_i conj(x[i]) * y[i]
cplx dot(const cplx* x, const cplx* y, std::size_t n);

/// sum_i w[i] * conj(x[i]) * y[i], w real
cplx wdot(const cplx* x, const cplx* y, const double* w, std::size_t n);

/// y[i] += a * x[i]
void axpy(cplx a, const cplx* x, cplx* y, std::size_t n);

/// sum_i w[i] * t[i]^h for t[i] >= 0. Half-integer h in [0, 3] is fully
/// vectorized (covers p in {1..6} for t = |.|^2); other h takes a shared
/// scalar path in both backends.
double wsum_powh(const double* t, const double* w, std::size_t n, double h);

/// out[i] = w[i] * t[i]^h, same h handling as wsum_powh
void powh_weights(const double* t, const double* w, double h, double* out, std::size_t n);

/// max_i |x[i]|^2 (0 for n == 0)
double max_abs2(const cplx* x, std::size_t n);

}  // namespace sparec::kern
