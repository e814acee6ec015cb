#include "doctest.h"

#include <cmath>

#include "sparec/combinatorial.hpp"
#include "sparec/discretization.hpp"
#include "sparec/kernels.hpp"
#include "sparec/random.hpp"

using namespace sparec;

namespace {

// ratio ||A c|| / ||S c|| for an explicit coefficient vector
double direct_ratio(const CMat& grid_cols, const CMat& sample_cols, std::span<const double> gw,
                    const CVec& c, Lp p) {
  CVec a(grid_cols.rows(), 0.0), b(sample_cols.rows(), 0.0);
  for (std::size_t j = 0; j < grid_cols.cols(); ++j) {
    kern::axpy(c[j], grid_cols.col(j), a.data(), a.size());
    kern::axpy(c[j], sample_cols.col(j), b.data(), b.size());
  }
  const double num = weighted_lp(a, gw, p);
  const double den = lp_norm_sample(b, p);
  return num / den;
}

}  // namespace

TEST_CASE("subspace constant: constants sample exactly") {
  GridDomain dom = GridDomain::uniform(32);
  FunctionSystem sys = FunctionSystem::trig(4, dom);
  SampleSet xi({0.1, 0.37, 0.81}, 1);
  const CMat g = sys.grid_matrix().select_cols(std::vector<std::size_t>{0});
  const CMat s = sys.matrix_at(xi).select_cols(std::vector<std::size_t>{0});
  for (Lp p : {Lp(2.0), Lp(4.0)}) {
    const SubspaceConstantResult r = subspace_constant(g, s, dom.weights(), p);
    CHECK_FALSE(r.infinite);
    CHECK(r.D == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("subspace constant: span{phi_0, phi_1} at 4 uniform points is exactly 1") {
  GridDomain dom = GridDomain::uniform(32);
  FunctionSystem sys = FunctionSystem::trig(4, dom);
  SampleSet xi = SampleSet::uniform(4);
  const std::vector<std::size_t> J = {0, 1};
  const SubspaceConstantResult r = subspace_constant(
      sys.grid_matrix().select_cols(J), sys.matrix_at(xi).select_cols(J), dom.weights(), Lp(2.0));
  CHECK(r.exact);
  CHECK(r.D == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("subspace constant: vanishing samples give an infinite constant") {
  GridDomain dom = GridDomain::uniform(64);
  // sin(2 pi x) sampled at its zeros {0, 0.5}
  CMat g(64, 1), s(2, 1);
  for (std::size_t i = 0; i < 64; ++i) g(i, 0) = std::sin(2 * M_PI * dom.coord(i));
  s(0, 0) = 0.0;
  s(1, 0) = 0.0;
  const SubspaceConstantResult r = subspace_constant(g, s, dom.weights(), Lp(2.0));
  CHECK(r.infinite);
  CHECK(std::isinf(r.D));
  CHECK_FALSE(r.witness.empty());
}

TEST_CASE("p=2 subspace constant is exact against dense sphere sampling") {
  GridDomain dom = GridDomain::uniform(128);
  FunctionSystem sys = FunctionSystem::trig(8, dom);
  Rng rng(21);
  for (int rep = 0; rep < 5; ++rep) {
    // random 2-dimensional subspace inside the trig span
    CMat g(128, 2), s(0, 0);
    const CVec mix1 = rng.normal_complex_vector(8);
    const CVec mix2 = rng.normal_complex_vector(8);
    CVec col1(128, 0.0), col2(128, 0.0);
    for (std::size_t j = 0; j < 8; ++j) {
      kern::axpy(mix1[j], sys.grid_matrix().col(j), col1.data(), 128);
      kern::axpy(mix2[j], sys.grid_matrix().col(j), col2.data(), 128);
    }
    std::copy(col1.begin(), col1.end(), g.col(0));
    std::copy(col2.begin(), col2.end(), g.col(1));
    SampleSet xi = SampleSet::random(12, 1000 + rep);
    CMat sm(12, 2);
    for (std::size_t nu = 0; nu < 12; ++nu) {
      cplx v1 = 0.0, v2 = 0.0;
      for (std::size_t j = 0; j < 8; ++j) {
        v1 += mix1[j] * sys.evaluate(j, xi.coord(nu));
        v2 += mix2[j] * sys.evaluate(j, xi.coord(nu));
      }
      sm(nu, 0) = v1;
      sm(nu, 1) = v2;
    }
    const SubspaceConstantResult exact = subspace_constant(g, sm, dom.weights(), Lp(2.0));
    REQUIRE_FALSE(exact.infinite);
    CHECK(exact.exact);
    // the witness itself attains the constant
    CHECK(direct_ratio(g, sm, dom.weights(), exact.witness, Lp(2.0)) ==
          doctest::Approx(exact.D).epsilon(1e-9));
    // dense random directions never exceed the exact constant
    double sampled = 0.0;
    for (int k = 0; k < 2000; ++k) {
      const CVec c = rng.normal_complex_vector(2);
      sampled = std::max(sampled, direct_ratio(g, sm, dom.weights(), c, Lp(2.0)));
    }
    CHECK(sampled <= exact.D + 1e-8);
    CHECK(sampled >= 0.5 * exact.D);
  }
}

TEST_CASE("p=4 search result dominates random directions and is flagged inexact") {
  GridDomain dom = GridDomain::uniform(64);
  FunctionSystem sys = FunctionSystem::trig(6, dom);
  SampleSet xi = SampleSet::random(16, 5);
  const std::vector<std::size_t> J = {1, 4};
  const CMat g = sys.grid_matrix().select_cols(J);
  const CMat s = sys.matrix_at(xi).select_cols(J);
  AscentOptions asc;
  asc.restarts = 8;
  const SubspaceConstantResult found = subspace_constant(g, s, dom.weights(), Lp(4.0), asc);
  REQUIRE_FALSE(found.infinite);
  CHECK_FALSE(found.exact);
  Rng rng(31);
  double sampled = 0.0;
  for (int k = 0; k < 5000; ++k) {
    const CVec c = rng.normal_complex_vector(2);
    sampled = std::max(sampled, direct_ratio(g, s, dom.weights(), c, Lp(4.0)));
  }
  CHECK(found.D >= sampled - 1e-6);
}

TEST_CASE("certify_universal: uniform points on the trig system are exact") {
  GridDomain dom = GridDomain::uniform(64);
  FunctionSystem sys = FunctionSystem::trig(4, dom);
  SampleSet xi = SampleSet::uniform(8);
  const DiscretizationCertificate cert =
      certify_universal(xi, sys, dom, 1, Lp(2.0), Sided::one_sided_D);
  CHECK(cert.ok());
  CHECK(cert.exact);
  CHECK(cert.constant == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(cert.subsets_checked == 4);

  const DiscretizationCertificate two =
      certify_universal(xi, sys, dom, 2, Lp(2.0), Sided::two_sided_eps);
  CHECK(two.ok());
  CHECK(two.constant < 1e-10);
}

TEST_CASE("p=4 certificate for uniform points stays near 1") {
  GridDomain dom = GridDomain::uniform(128);
  FunctionSystem sys = FunctionSystem::trig(6, dom);
  SampleSet xi = SampleSet::uniform(16);
  AscentOptions asc;
  asc.restarts = 8;
  const DiscretizationCertificate cert =
      certify_universal(xi, sys, dom, 2, Lp(4.0), Sided::one_sided_D, 100000, asc);
  REQUIRE(cert.ok());
  CHECK(cert.constant >= 1.0);
  CHECK(cert.constant <= 1.2);
  // cross-check the search result from below with dense random directions
  Rng rng(91);
  double sampled = 0.0;
  const CMat at_samples = sys.matrix_at(xi);
  SubsetEnumerator en(6, 2);
  std::vector<std::size_t> J;
  while (en.next(J)) {
    const CMat g = sys.grid_matrix().select_cols(J);
    const CMat s = at_samples.select_cols(J);
    for (int k = 0; k < 700; ++k) {
      const CVec c = rng.normal_complex_vector(2);
      sampled = std::max(sampled, direct_ratio(g, s, dom.weights(), c, Lp(4.0)));
    }
  }
  CHECK(sampled <= cert.constant + 1e-8);
}

TEST_CASE("certify_universal fails when m < v") {
  GridDomain dom = GridDomain::uniform(64);
  FunctionSystem sys = FunctionSystem::trig(5, dom);
  SampleSet xi({0.3}, 1);
  const DiscretizationCertificate cert =
      certify_universal(xi, sys, dom, 2, Lp(2.0), Sided::one_sided_D);
  CHECK_FALSE(cert.ok());
  CHECK(std::isinf(cert.constant));

  // two-sided certification fails cleanly too, at p = 2 and p != 2
  for (double p : {2.0, 4.0}) {
    const DiscretizationCertificate two =
        certify_universal(xi, sys, dom, 2, Lp(p), Sided::two_sided_eps);
    CHECK_FALSE(two.ok());
    CHECK(two.constant >= 1.0);
  }

  CHECK_THROWS_AS(certify_universal(xi, sys, dom, 2, Lp(2.0), Sided::one_sided_D, 5),
                  BudgetError);
}

TEST_CASE("two-sided certification at p=4 brackets the sampled range") {
  GridDomain dom = GridDomain::uniform(128);
  FunctionSystem sys = FunctionSystem::trig(4, dom);
  SampleSet xi = SampleSet::random(48, 88);
  AscentOptions asc;
  asc.restarts = 8;
  const DiscretizationCertificate cert =
      certify_universal(xi, sys, dom, 1, Lp(4.0), Sided::two_sided_eps, 100000, asc);
  REQUIRE(cert.ok());
  // every random member of the covered union respects the epsilon range
  Rng rng(89);
  const double eps = cert.constant + 1e-8;
  for (int rep = 0; rep < 500; ++rep) {
    const SparseElement e({std::size_t(rng.below(4))}, {rng.normal_complex()});
    const CVec grid = evaluate_sparse(e, sys, dom);
    const CVec samp = evaluate_sparse(e, sys, xi);
    const double cp = std::pow(lp_norm_continuous(grid, dom, Lp(4.0)), 4.0);
    const double sp = std::pow(lp_norm_sample(samp, Lp(4.0)), 4.0);
    CHECK(sp >= (1.0 - eps) * cp * (1.0 - 1e-9));
    CHECK(sp <= (1.0 + eps) * cp * (1.0 + 1e-9));
  }
}

TEST_CASE("duplicating the sample set leaves the exact constant invariant") {
  GridDomain dom = GridDomain::uniform(64);
  FunctionSystem sys = FunctionSystem::trig(5, dom);
  SampleSet xi = SampleSet::random(9, 3);
  std::vector<double> doubled(xi.points_flat().begin(), xi.points_flat().end());
  doubled.insert(doubled.end(), xi.points_flat().begin(), xi.points_flat().end());
  // duplicated points are allowed: the counting measure folds them in
  std::vector<double> pts = doubled;
  SampleSet xi2(std::move(pts), 1);
  const std::vector<std::size_t> J = {0, 2, 4};
  const CMat g = sys.grid_matrix().select_cols(J);
  const SubspaceConstantResult a =
      subspace_constant(g, sys.matrix_at(xi).select_cols(J), dom.weights(), Lp(2.0));
  const SubspaceConstantResult b =
      subspace_constant(g, sys.matrix_at(xi2).select_cols(J), dom.weights(), Lp(2.0));
  CHECK(a.D == doctest::Approx(b.D).epsilon(1e-12));
}

TEST_CASE("one-sided certificate for X_u covers every smaller collection") {
  GridDomain dom = GridDomain::uniform(64);
  FunctionSystem sys = FunctionSystem::trig(6, dom);
  SampleSet xi = SampleSet::random(24, 9);
  const DiscretizationCertificate big =
      certify_universal(xi, sys, dom, 3, Lp(2.0), Sided::one_sided_D);
  REQUIRE(big.ok());
  for (std::size_t v = 1; v <= 2; ++v) {
    const DiscretizationCertificate small =
        certify_universal(xi, sys, dom, v, Lp(2.0), Sided::one_sided_D);
    CHECK(small.constant <= big.constant + 1e-10);
  }
}

TEST_CASE("random point search succeeds for easy targets and reports stats") {
  GridDomain dom = GridDomain::uniform(64);
  FunctionSystem sys = FunctionSystem::trig(4, dom);
  SearchConfig cfg;
  cfg.m = 64;
  cfg.trials = 20;
  cfg.seed = 123;
  cfg.target_D = 2.0;
  cfg.exhaustive = true;
  const SearchOutcome out =
      random_point_search(sys, dom, 1, Lp(2.0), Sided::one_sided_D, cfg);
  CHECK(out.success);
  CHECK(out.trials_run == 20);
  CHECK(out.successes >= 19);  // v=1, generous m: near-certain success
  REQUIRE(out.certificate.has_value());
  CHECK(out.certificate->constant <= 2.0);
  CHECK(out.points->size() == 64);

  // m below the dimension count always fails
  SearchConfig tiny = cfg;
  tiny.m = 1;
  tiny.trials = 5;
  const SearchOutcome fail =
      random_point_search(sys, dom, 2, Lp(2.0), Sided::one_sided_D, tiny);
  CHECK_FALSE(fail.success);
  CHECK(fail.successes == 0);
}

TEST_CASE("search success rate grows with m") {
  GridDomain dom = GridDomain::uniform(128);
  FunctionSystem sys = FunctionSystem::trig(8, dom);
  AscentOptions asc;
  asc.restarts = 3;
  asc.iterations = 30;
  std::vector<double> rates;
  for (std::size_t m : {3, 6, 12, 48}) {
    SearchConfig cfg;
    cfg.m = m;
    cfg.trials = 20;
    cfg.seed = 71;
    cfg.target_D = 2.0;
    cfg.exhaustive = true;
    const SearchOutcome out =
        random_point_search(sys, dom, 2, Lp(4.0), Sided::one_sided_D, cfg, 100000, asc);
    rates.push_back(double(out.successes) / double(out.trials_run));
  }
  // monotone up to trial noise; the extremes are clear-cut
  CHECK(rates.front() <= rates.back());
  CHECK(rates.back() >= 0.9);
  for (std::size_t i = 1; i < rates.size(); ++i) CHECK(rates[i] + 0.25 >= rates[i - 1]);
}

TEST_CASE("json serialization of certificates and traces") {
  GridDomain dom = GridDomain::uniform(64);
  FunctionSystem sys = FunctionSystem::trig(4, dom);
  const DiscretizationCertificate cert =
      certify_universal(SampleSet::uniform(8), sys, dom, 1, Lp(2.0), Sided::one_sided_D);
  const nlohmann::json j = cert.to_json();
  CHECK(j.at("sided") == "one_sided_D");
  CHECK(j.at("exact") == true);
  CHECK(j.at("subsets_checked") == 4);
  CHECK(j.at("xi").at("m") == 8);
}

TEST_CASE("minimal_m_estimate is small for v=1 and deterministic") {
  GridDomain dom = GridDomain::uniform(64);
  FunctionSystem sys = FunctionSystem::trig(8, dom);
  SearchConfig cfg;
  cfg.trials = 5;
  cfg.seed = 7;
  cfg.target_D = 2.0;
  const std::size_t m1 = minimal_m_estimate(sys, dom, 1, Lp(2.0), Sided::one_sided_D, cfg, 256);
  CHECK(m1 <= 16);
  const std::size_t again = minimal_m_estimate(sys, dom, 1, Lp(2.0), Sided::one_sided_D, cfg, 256);
  CHECK(m1 == again);

  SearchConfig hopeless = cfg;
  hopeless.target_D = 1.0 + 1e-9;  // random points essentially never achieve D ~ 1
  CHECK_THROWS_AS(
      minimal_m_estimate(sys, dom, 2, Lp(2.0), Sided::one_sided_D, hopeless, 8),
      BudgetError);
}

TEST_CASE("certified one-sided set bounds random members of the union") {
  GridDomain dom = GridDomain::uniform(128);
  FunctionSystem sys = FunctionSystem::trig(6, dom);
  SampleSet xi = SampleSet::random(32, 17);
  const Lp p(4.0);
  AscentOptions asc;
  asc.restarts = 12;
  const DiscretizationCertificate cert =
      certify_universal(xi, sys, dom, 2, p, Sided::one_sided_D, 100000, asc);
  REQUIRE(cert.ok());
  Rng rng(55);
  for (int rep = 0; rep < 1000; ++rep) {
    std::size_t i = std::size_t(rng.below(6)), j = i;
    while (j == i) j = std::size_t(rng.below(6));
    const SparseElement e({std::min(i, j), std::max(i, j)},
                          {rng.normal_complex(), rng.normal_complex()});
    const CVec grid = evaluate_sparse(e, sys, dom);
    const CVec samp = evaluate_sparse(e, sys, xi);
    CHECK(lp_norm_continuous(grid, dom, p) <=
          (cert.constant + 1e-8) * lp_norm_sample(samp, p) * (1.0 + 1e-9));
  }
}
