#include "sparec/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>

#include "table.hpp"

namespace sparec::kern {
namespace detail {

namespace {

void abs2_scalar(const cplx* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double re = x[i].real(), im = x[i].imag();
    out[i] = re * re + im * im;
  }
}

cplx dot_scalar(const cplx* x, const cplx* y, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    const double yr = y[i].real(), yi = y[i].imag();
    re += xr * yr + xi * yi;
    im += xr * yi - xi * yr;
  }
  return {re, im};
}

cplx wdot_scalar(const cplx* x, const cplx* y, const double* w, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = w[i] * x[i].real(), xi = w[i] * x[i].imag();
    const double yr = y[i].real(), yi = y[i].imag();
    re += xr * yr + xi * yi;
    im += xr * yi - xi * yr;
  }
  return {re, im};
}

void axpy_scalar(cplx a, const cplx* x, cplx* y, std::size_t n) {
  const double ar = a.real(), ai = a.imag();
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    y[i] += cplx{ar * xr - ai * xi, ar * xi + ai * xr};
  }
}

double wsum_powh_scalar(const double* t, const double* w, std::size_t n, double h) {
  double s = 0.0;
  if (h == 0.0) {
    for (std::size_t i = 0; i < n; ++i) s += w[i];
  } else if (h == 0.5) {
    for (std::size_t i = 0; i < n; ++i) s += w[i] * std::sqrt(t[i]);
  } else if (h == 1.0) {
    for (std::size_t i = 0; i < n; ++i) s += w[i] * t[i];
  } else if (h == 1.5) {
    for (std::size_t i = 0; i < n; ++i) s += w[i] * t[i] * std::sqrt(t[i]);
  } else if (h == 2.0) {
    for (std::size_t i = 0; i < n; ++i) s += w[i] * t[i] * t[i];
  } else if (h == 2.5) {
    for (std::size_t i = 0; i < n; ++i) s += w[i] * t[i] * t[i] * std::sqrt(t[i]);
  } else if (h == 3.0) {
    for (std::size_t i = 0; i < n; ++i) s += w[i] * t[i] * t[i] * t[i];
  } else {
    return wsum_powh_general(t, w, n, h);
  }
  return s;
}

void powh_weights_scalar(const double* t, const double* w, double h, double* out, std::size_t n) {
  if (h == 0.0) {
    std::memcpy(out, w, n * sizeof(double));
  } else if (h == 0.5) {
    for (std::size_t i = 0; i < n; ++i) out[i] = w[i] * std::sqrt(t[i]);
  } else if (h == 1.0) {
    for (std::size_t i = 0; i < n; ++i) out[i] = w[i] * t[i];
  } else if (h == 1.5) {
    for (std::size_t i = 0; i < n; ++i) out[i] = w[i] * t[i] * std::sqrt(t[i]);
  } else if (h == 2.0) {
    for (std::size_t i = 0; i < n; ++i) out[i] = w[i] * t[i] * t[i];
  } else if (h == 2.5) {
    for (std::size_t i = 0; i < n; ++i) out[i] = w[i] * t[i] * t[i] * std::sqrt(t[i]);
  } else if (h == 3.0) {
    for (std::size_t i = 0; i < n; ++i) out[i] = w[i] * t[i] * t[i] * t[i];
  } else {
    powh_weights_general(t, w, h, out, n);
  }
}

double max_abs2_scalar(const cplx* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double re = x[i].real(), im = x[i].imag();
    const double a = re * re + im * im;
    if (a > m) m = a;
  }
  return m;
}

}  // namespace

const OpsTable scalar_table = {
    abs2_scalar, dot_scalar,          wdot_scalar,   axpy_scalar,
    wsum_powh_scalar, powh_weights_scalar, max_abs2_scalar,
};

bool powh_fast_path(double h) {
  return h == 0.0 || h == 0.5 || h == 1.0 || h == 1.5 || h == 2.0 || h == 2.5 || h == 3.0;
}

double wsum_powh_general(const double* t, const double* w, std::size_t n, double h) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * std::pow(t[i], h);
  return s;
}

void powh_weights_general(const double* t, const double* w, double h, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = w[i] * std::pow(t[i], h);
}

}  // namespace detail

namespace {

struct Dispatch {
  const detail::OpsTable* table;
  Backend backend;

  Dispatch() {
    table = &detail::scalar_table;
    backend = Backend::scalar;
    const detail::OpsTable* avx2 = detail::avx2_table();
    if (avx2 != nullptr) {
      table = avx2;
      backend = Backend::avx2;
    }
    if (const char* env = std::getenv("SPAREC_KERNELS")) {
      if (std::strcmp(env, "scalar") == 0) {
        table = &detail::scalar_table;
        backend = Backend::scalar;
      } else if (std::strcmp(env, "avx2") == 0 && avx2 != nullptr) {
        table = avx2;
        backend = Backend::avx2;
      }
    }
  }
};

Dispatch& dispatch() {
  static Dispatch d;
  return d;
}

}  // namespace

Backend active_backend() { return dispatch().backend; }

bool backend_supported(Backend b) {
  return b == Backend::scalar || detail::avx2_table() != nullptr;
}

bool set_backend(Backend b) {
  if (!backend_supported(b)) return false;
  Dispatch& d = dispatch();
  d.backend = b;
  d.table = (b == Backend::scalar) ? &detail::scalar_table : detail::avx2_table();
  return true;
}

const char* backend_name(Backend b) { return b == Backend::scalar ? "scalar" : "avx2"; }

void abs2(const cplx* x, double* out, std::size_t n) { dispatch().table->abs2(x, out, n); }

cplx dot(const cplx* x, const cplx* y, std::size_t n) { return dispatch().table->dot(x, y, n); }

cplx wdot(const cplx* x, const cplx* y, const double* w, std::size_t n) {
  return dispatch().table->wdot(x, y, w, n);
}

void axpy(cplx a, const cplx* x, cplx* y, std::size_t n) { dispatch().table->axpy(a, x, y, n); }

double wsum_powh(const double* t, const double* w, std::size_t n, double h) {
  return dispatch().table->wsum_powh(t, w, n, h);
}

void powh_weights(const double* t, const double* w, double h, double* out, std::size_t n) {
  dispatch().table->powh_weights(t, w, h, out, n);
}

double max_abs2(const cplx* x, std::size_t n) { return dispatch().table->max_abs2(x, n); }

}  // namespace sparec::kern
