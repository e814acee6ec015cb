// AVX2+FMA kernel variants. This translation unit is compiled with
// -mavx2 -mfma; nothing here may run unless avx2_table() returned non-null.

#include "table.hpp"

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

#include <cmath>
#include <cstring>

namespace sparec::kern::detail {
namespace {

inline double powh_one(double t, double h) {
  if (h == 0.0) return 1.0;
  if (h == 0.5) return std::sqrt(t);
  if (h == 1.0) return t;
  if (h == 1.5) return t * std::sqrt(t);
  if (h == 2.0) return t * t;
  if (h == 2.5) return t * t * std::sqrt(t);
  return t * t * t;  // h == 3.0
}

inline double hsum(__m256d v) {
  double buf[4];
  _mm256_storeu_pd(buf, v);
  return (buf[0] + buf[1]) + (buf[2] + buf[3]);
}

// [w0,w1] -> [w0,w0,w1,w1] so a real weight multiplies both components of its
// interleaved complex element.
inline __m256d pair_broadcast(const double* w) {
  __m128d lo = _mm_loadu_pd(w);
  return _mm256_permute4x64_pd(_mm256_set_m128d(lo, lo), _MM_SHUFFLE(1, 1, 0, 0));
}

void abs2_avx2(const cplx* x, double* out, std::size_t n) {
  const double* xs = reinterpret_cast<const double*>(x);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d a = _mm256_loadu_pd(xs + 2 * i);
    __m256d b = _mm256_loadu_pd(xs + 2 * i + 4);
    __m256d h = _mm256_hadd_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b));
    // h = [|x0|^2, |x2|^2, |x1|^2, |x3|^2]
    _mm256_storeu_pd(out + i, _mm256_permute4x64_pd(h, _MM_SHUFFLE(3, 1, 2, 0)));
  }
  for (; i < n; ++i) {
    const double re = xs[2 * i], im = xs[2 * i + 1];
    out[i] = re * re + im * im;
  }
}

cplx dot_avx2(const cplx* x, const cplx* y, std::size_t n) {
  const double* xs = reinterpret_cast<const double*>(x);
  const double* ys = reinterpret_cast<const double*>(y);
  __m256d acc_re0 = _mm256_setzero_pd(), acc_im0 = _mm256_setzero_pd();
  __m256d acc_re1 = _mm256_setzero_pd(), acc_im1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d xv0 = _mm256_loadu_pd(xs + 2 * i);
    __m256d yv0 = _mm256_loadu_pd(ys + 2 * i);
    __m256d xv1 = _mm256_loadu_pd(xs + 2 * i + 4);
    __m256d yv1 = _mm256_loadu_pd(ys + 2 * i + 4);
    acc_re0 = _mm256_fmadd_pd(xv0, yv0, acc_re0);
    acc_re1 = _mm256_fmadd_pd(xv1, yv1, acc_re1);
    acc_im0 = _mm256_fmadd_pd(xv0, _mm256_permute_pd(yv0, 0b0101), acc_im0);
    acc_im1 = _mm256_fmadd_pd(xv1, _mm256_permute_pd(yv1, 0b0101), acc_im1);
  }
  for (; i + 2 <= n; i += 2) {
    __m256d xv = _mm256_loadu_pd(xs + 2 * i);
    __m256d yv = _mm256_loadu_pd(ys + 2 * i);
    acc_re0 = _mm256_fmadd_pd(xv, yv, acc_re0);
    acc_im0 = _mm256_fmadd_pd(xv, _mm256_permute_pd(yv, 0b0101), acc_im0);
  }
  double re_buf[4], im_buf[4];
  _mm256_storeu_pd(re_buf, _mm256_add_pd(acc_re0, acc_re1));
  _mm256_storeu_pd(im_buf, _mm256_add_pd(acc_im0, acc_im1));
  double re = (re_buf[0] + re_buf[1]) + (re_buf[2] + re_buf[3]);
  double im = (im_buf[0] - im_buf[1]) + (im_buf[2] - im_buf[3]);
  for (; i < n; ++i) {
    const double xr = xs[2 * i], xi = xs[2 * i + 1];
    const double yr = ys[2 * i], yi = ys[2 * i + 1];
    re += xr * yr + xi * yi;
    im += xr * yi - xi * yr;
  }
  return {re, im};
}

cplx wdot_avx2(const cplx* x, const cplx* y, const double* w, std::size_t n) {
  const double* xs = reinterpret_cast<const double*>(x);
  const double* ys = reinterpret_cast<const double*>(y);
  __m256d acc_re = _mm256_setzero_pd(), acc_im = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d xv = _mm256_mul_pd(_mm256_loadu_pd(xs + 2 * i), pair_broadcast(w + i));
    __m256d yv = _mm256_loadu_pd(ys + 2 * i);
    acc_re = _mm256_fmadd_pd(xv, yv, acc_re);
    acc_im = _mm256_fmadd_pd(xv, _mm256_permute_pd(yv, 0b0101), acc_im);
  }
  double re_buf[4], im_buf[4];
  _mm256_storeu_pd(re_buf, acc_re);
  _mm256_storeu_pd(im_buf, acc_im);
  double re = (re_buf[0] + re_buf[1]) + (re_buf[2] + re_buf[3]);
  double im = (im_buf[0] - im_buf[1]) + (im_buf[2] - im_buf[3]);
  for (; i < n; ++i) {
    const double xr = w[i] * xs[2 * i], xi = w[i] * xs[2 * i + 1];
    const double yr = ys[2 * i], yi = ys[2 * i + 1];
    re += xr * yr + xi * yi;
    im += xr * yi - xi * yr;
  }
  return {re, im};
}

void axpy_avx2(cplx a, const cplx* x, cplx* y, std::size_t n) {
  const double* xs = reinterpret_cast<const double*>(x);
  double* ys = reinterpret_cast<double*>(y);
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d xv = _mm256_loadu_pd(xs + 2 * i);
    __m256d xsw = _mm256_permute_pd(xv, 0b0101);
    // [ar*xr - ai*xi, ar*xi + ai*xr] per element
    __m256d prod = _mm256_fmaddsub_pd(ar, xv, _mm256_mul_pd(ai, xsw));
    _mm256_storeu_pd(ys + 2 * i, _mm256_add_pd(_mm256_loadu_pd(ys + 2 * i), prod));
  }
  const double arr = a.real(), aii = a.imag();
  for (; i < n; ++i) {
    const double xr = xs[2 * i], xi = xs[2 * i + 1];
    ys[2 * i] += arr * xr - aii * xi;
    ys[2 * i + 1] += arr * xi + aii * xr;
  }
}

double wsum_powh_avx2(const double* t, const double* w, std::size_t n, double h) {
  if (!powh_fast_path(h)) return wsum_powh_general(t, w, n, h);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  if (h == 0.0) {
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(w + i));
  } else if (h == 0.5) {
    for (; i + 4 <= n; i += 4) {
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), _mm256_sqrt_pd(_mm256_loadu_pd(t + i)), acc);
    }
  } else if (h == 1.0) {
    for (; i + 4 <= n; i += 4) {
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(t + i), acc);
    }
  } else if (h == 1.5) {
    for (; i + 4 <= n; i += 4) {
      __m256d tv = _mm256_loadu_pd(t + i);
      __m256d v = _mm256_mul_pd(tv, _mm256_sqrt_pd(tv));
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), v, acc);
    }
  } else if (h == 2.0) {
    for (; i + 4 <= n; i += 4) {
      __m256d tv = _mm256_loadu_pd(t + i);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), _mm256_mul_pd(tv, tv), acc);
    }
  } else if (h == 2.5) {
    for (; i + 4 <= n; i += 4) {
      __m256d tv = _mm256_loadu_pd(t + i);
      __m256d v = _mm256_mul_pd(_mm256_mul_pd(tv, tv), _mm256_sqrt_pd(tv));
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), v, acc);
    }
  } else {  // h == 3.0
    for (; i + 4 <= n; i += 4) {
      __m256d tv = _mm256_loadu_pd(t + i);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), _mm256_mul_pd(_mm256_mul_pd(tv, tv), tv), acc);
    }
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += w[i] * powh_one(t[i], h);
  return s;
}

void powh_weights_avx2(const double* t, const double* w, double h, double* out, std::size_t n) {
  if (!powh_fast_path(h)) {
    powh_weights_general(t, w, h, out, n);
    return;
  }
  if (h == 0.0) {
    std::memcpy(out, w, n * sizeof(double));
    return;
  }
  std::size_t i = 0;
  if (h == 0.5) {
    for (; i + 4 <= n; i += 4) {
      _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(w + i),
                                              _mm256_sqrt_pd(_mm256_loadu_pd(t + i))));
    }
  } else if (h == 1.0) {
    for (; i + 4 <= n; i += 4) {
      _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(t + i)));
    }
  } else if (h == 1.5) {
    for (; i + 4 <= n; i += 4) {
      __m256d tv = _mm256_loadu_pd(t + i);
      __m256d v = _mm256_mul_pd(tv, _mm256_sqrt_pd(tv));
      _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(w + i), v));
    }
  } else if (h == 2.0) {
    for (; i + 4 <= n; i += 4) {
      __m256d tv = _mm256_loadu_pd(t + i);
      _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_mul_pd(tv, tv)));
    }
  } else if (h == 2.5) {
    for (; i + 4 <= n; i += 4) {
      __m256d tv = _mm256_loadu_pd(t + i);
      __m256d v = _mm256_mul_pd(_mm256_mul_pd(tv, tv), _mm256_sqrt_pd(tv));
      _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(w + i), v));
    }
  } else {  // h == 3.0
    for (; i + 4 <= n; i += 4) {
      __m256d tv = _mm256_loadu_pd(t + i);
      __m256d v = _mm256_mul_pd(_mm256_mul_pd(tv, tv), tv);
      _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(w + i), v));
    }
  }
  for (; i < n; ++i) out[i] = w[i] * powh_one(t[i], h);
}

double max_abs2_avx2(const cplx* x, std::size_t n) {
  const double* xs = reinterpret_cast<const double*>(x);
  __m256d mx = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d a = _mm256_loadu_pd(xs + 2 * i);
    __m256d b = _mm256_loadu_pd(xs + 2 * i + 4);
    // order within the register is irrelevant for a max reduction
    mx = _mm256_max_pd(mx, _mm256_hadd_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b)));
  }
  double buf[4];
  _mm256_storeu_pd(buf, mx);
  double m = buf[0];
  if (buf[1] > m) m = buf[1];
  if (buf[2] > m) m = buf[2];
  if (buf[3] > m) m = buf[3];
  for (; i < n; ++i) {
    const double re = xs[2 * i], im = xs[2 * i + 1];
    const double a = re * re + im * im;
    if (a > m) m = a;
  }
  return m;
}

const OpsTable avx2_ops = {
    abs2_avx2, dot_avx2,          wdot_avx2,         axpy_avx2,
    wsum_powh_avx2, powh_weights_avx2, max_abs2_avx2,
};

}  // namespace

const OpsTable* avx2_table() {
  static const bool supported =
      __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &avx2_ops : nullptr;
}

}  // namespace sparec::kern::detail

#else

namespace sparec::kern::detail {
const OpsTable* avx2_table() { return nullptr; }
}  // namespace sparec::kern::detail

#endif
