#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include "sparec/cmat.hpp"
#include "sparec/kernels.hpp"
#include "sparec/random.hpp"

using namespace sparec;
namespace k = sparec::kern;

namespace {

struct BackendGuard {
  k::Backend saved;
  BackendGuard() : saved(k::active_backend()) {}
  ~BackendGuard() { k::set_backend(saved); }
};

CVec random_cvec(Rng& rng, std::size_t n) { return rng.normal_complex_vector(n); }

std::vector<double> random_weights(Rng& rng, std::size_t n) {
  std::vector<double> w(n);
  for (auto& x : w) x = rng.uniform(0.1, 2.0);
  return w;
}

}  // namespace

TEST_CASE("scalar kernels match hand computations") {
  BackendGuard guard;
  REQUIRE(k::set_backend(k::Backend::scalar));

  const CVec x = {{1.0, 2.0}, {-3.0, 0.5}};
  const CVec y = {{0.0, 1.0}, {2.0, -1.0}};
  double t[2];
  k::abs2(x.data(), t, 2);
  CHECK(t[0] == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(t[1] == doctest::Approx(9.25).epsilon(1e-15));

  // conj(x0) y0 = (1-2i)(i) = 2 + i; conj(x1) y1 = (-3-0.5i)(2-i) = -6.5 + 2i
  const cplx d = k::dot(x.data(), y.data(), 2);
  CHECK(d.real() == doctest::Approx(-4.5).epsilon(1e-15));
  CHECK(d.imag() == doctest::Approx(3.0).epsilon(1e-15));

  const double w[2] = {2.0, 0.5};
  const cplx wd = k::wdot(x.data(), y.data(), w, 2);
  CHECK(wd.real() == doctest::Approx(2.0 * 2.0 + 0.5 * -6.5).epsilon(1e-15));
  CHECK(wd.imag() == doctest::Approx(2.0 * 1.0 + 0.5 * 2.0).epsilon(1e-15));

  CVec acc = {{1.0, 0.0}, {0.0, 0.0}};
  k::axpy({0.0, 1.0}, x.data(), acc.data(), 2);  // acc += i * x
  CHECK(acc[0].real() == doctest::Approx(-1.0));
  CHECK(acc[0].imag() == doctest::Approx(1.0));
  CHECK(acc[1].real() == doctest::Approx(-0.5));
  CHECK(acc[1].imag() == doctest::Approx(-3.0));

  CHECK(k::max_abs2(x.data(), 2) == doctest::Approx(9.25));
  CHECK(k::max_abs2(x.data(), 0) == 0.0);

  const double tt[3] = {4.0, 9.0, 0.25};
  const double ww[3] = {1.0, 2.0, 4.0};
  CHECK(k::wsum_powh(tt, ww, 3, 0.5) == doctest::Approx(1.0 * 2 + 2.0 * 3 + 4.0 * 0.5));
  CHECK(k::wsum_powh(tt, ww, 3, 2.0) == doctest::Approx(16.0 + 2 * 81.0 + 4 * 0.0625));
  CHECK(k::wsum_powh(tt, ww, 3, 0.7) ==
        doctest::Approx(std::pow(4.0, 0.7) + 2 * std::pow(9.0, 0.7) + 4 * std::pow(0.25, 0.7)));
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
  if (!k::backend_supported(k::Backend::avx2)) {
    MESSAGE("avx2 not supported on this host; skipping equivalence");
    return;
  }
  BackendGuard guard;
  Rng rng(99);
  const std::vector<std::size_t> sizes = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 33, 100, 257, 1024};
  const std::vector<double> hs = {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 0.77, 1.9};

  for (std::size_t n : sizes) {
    const CVec x = random_cvec(rng, n);
    const CVec y = random_cvec(rng, n);
    const std::vector<double> w = random_weights(rng, n);
    std::vector<double> t(n);
    const cplx a = rng.normal_complex();

    REQUIRE(k::set_backend(k::Backend::scalar));
    std::vector<double> abs2_s(n);
    k::abs2(x.data(), abs2_s.data(), n);
    const cplx dot_s = k::dot(x.data(), y.data(), n);
    const cplx wdot_s = k::wdot(x.data(), y.data(), w.data(), n);
    CVec axpy_s = y;
    k::axpy(a, x.data(), axpy_s.data(), n);
    const double max_s = k::max_abs2(x.data(), n);
    t = abs2_s;
    std::vector<double> sums_s, pw_s(n);
    for (double h : hs) sums_s.push_back(k::wsum_powh(t.data(), w.data(), n, h));

    REQUIRE(k::set_backend(k::Backend::avx2));
    std::vector<double> abs2_a(n);
    k::abs2(x.data(), abs2_a.data(), n);
    const cplx dot_a = k::dot(x.data(), y.data(), n);
    const cplx wdot_a = k::wdot(x.data(), y.data(), w.data(), n);
    CVec axpy_a = y;
    k::axpy(a, x.data(), axpy_a.data(), n);
    const double max_a = k::max_abs2(x.data(), n);

    const double scale = double(n) + 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(abs2_a[i] == doctest::Approx(abs2_s[i]).epsilon(1e-14));
      CHECK(std::abs(axpy_a[i] - axpy_s[i]) <= 1e-13 * (1.0 + std::abs(axpy_s[i])));
    }
    CHECK(std::abs(dot_a - dot_s) <= 1e-12 * scale);
    CHECK(std::abs(wdot_a - wdot_s) <= 1e-12 * scale);
    CHECK(max_a == doctest::Approx(max_s).epsilon(1e-14));
    for (std::size_t hi = 0; hi < hs.size(); ++hi) {
      const double got = k::wsum_powh(t.data(), w.data(), n, hs[hi]);
      CHECK(std::abs(got - sums_s[hi]) <= 1e-12 * (1.0 + std::abs(sums_s[hi])) * scale);
      std::vector<double> pw_a(n);
      k::powh_weights(t.data(), w.data(), hs[hi], pw_a.data(), n);
      REQUIRE(k::set_backend(k::Backend::scalar));
      k::powh_weights(t.data(), w.data(), hs[hi], pw_s.data(), n);
      REQUIRE(k::set_backend(k::Backend::avx2));
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(pw_a[i] == doctest::Approx(pw_s[i]).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("backend selection is sticky and reversible") {
  BackendGuard guard;
  REQUIRE(k::set_backend(k::Backend::scalar));
  CHECK(k::active_backend() == k::Backend::scalar);
  if (k::backend_supported(k::Backend::avx2)) {
    REQUIRE(k::set_backend(k::Backend::avx2));
    CHECK(k::active_backend() == k::Backend::avx2);
  }
}
