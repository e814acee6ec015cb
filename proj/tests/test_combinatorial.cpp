#include "doctest.h"

#include <cmath>
#include <set>

#include "sparec/combinatorial.hpp"
#include "sparec/kernels.hpp"
#include "sparec/random.hpp"

using namespace sparec;

TEST_CASE("subset enumerator is lexicographic and complete") {
  SubsetEnumerator en(5, 3);
  std::vector<std::vector<std::size_t>> all;
  std::vector<std::size_t> s;
  while (en.next(s)) all.push_back(s);
  CHECK(all.size() == 10);
  CHECK(all.front() == std::vector<std::size_t>{0, 1, 2});
  CHECK(all.back() == std::vector<std::size_t>{2, 3, 4});
  std::set<std::vector<std::size_t>> uniq(all.begin(), all.end());
  CHECK(uniq.size() == all.size());
  for (std::size_t i = 1; i < all.size(); ++i) CHECK(all[i - 1] < all[i]);

  CHECK(SubsetEnumerator::count(5, 3) == doctest::Approx(10.0));
  CHECK(SubsetEnumerator::count(16, 2) == doctest::Approx(120.0));
  CHECK(SubsetEnumerator::count(40, 20) > 1e10);
  CHECK_THROWS_AS(SubsetEnumerator(3, 5), DomainError);
}

TEST_CASE("algorithm1 picks the dominant component") {
  GridDomain dom = GridDomain::uniform(64);
  FunctionSystem sys = FunctionSystem::trig(6, dom);
  SampleSet xi = SampleSet::uniform(12);

  // f = phi_2 + 0.05 phi_4; brute-force oracle over all six 1-subsets
  SparseElement f({2, 4}, {1.0, 0.05});
  const CVec f_grid = evaluate_sparse(f, sys, dom);
  const CVec f_samples = evaluate_sparse(f, sys, xi);
  const RecoveryOutcome out = algorithm1(f_grid, f_samples, sys, dom, xi, 1, Lp(2.0));
  CHECK(out.support == std::vector<std::size_t>{2});
  CHECK(out.subsets_examined == 6);

  // oracle: independent sweep using the solver directly
  const CMat at_samples = sys.matrix_at(xi);
  const std::vector<double> w = xi.counting_weights();
  double best = 1e300;
  std::size_t best_j = 99;
  for (std::size_t j = 0; j < 6; ++j) {
    const CMat col = at_samples.select_cols(std::vector<std::size_t>{j});
    const ProjectionResult fit = lpw_recover(f_samples, col, Lp(2.0), w);
    const CMat gcol = sys.grid_matrix().select_cols(std::vector<std::size_t>{j});
    const CVec r = residual_values(f_grid, gcol, fit.coeffs);
    const double err = lp_norm_continuous(r, dom, Lp(2.0));
    if (err < best) {
      best = err;
      best_j = j;
    }
  }
  CHECK(best_j == 2);
  CHECK(*out.error_continuous == doctest::Approx(best).epsilon(1e-12));

  // exact sparse input: error ~ 0 and support recovered
  SparseElement g({1, 3}, {cplx{1.0, 0.5}, cplx{0.0, -2.0}});
  const RecoveryOutcome exact = algorithm1(evaluate_sparse(g, sys, dom),
                                           evaluate_sparse(g, sys, xi), sys, dom, xi, 2, Lp(2.0));
  CHECK(exact.support == std::vector<std::size_t>{1, 3});
  CHECK(*exact.error_continuous < 1e-10);

  // v = N: the full-system projection error
  const RecoveryOutcome full = algorithm1(f_grid, f_samples, sys, dom, xi, 6, Lp(2.0));
  CHECK(full.subsets_examined == 1);
  CHECK(*full.error_continuous < 1e-10);
  const RecoveryOutcome full2 = algorithm2(f_samples, sys, xi, 6, Lp(2.0));
  const ProjectionResult direct =
      lpw_recover(f_samples, sys.matrix_at(xi), Lp(2.0), xi.counting_weights());
  CHECK(full2.error_sample == doctest::Approx(direct.residual_norm).epsilon(1e-14));

  CombiOptions tiny;
  tiny.subset_budget = 2;
  CHECK_THROWS_AS(algorithm1(f_grid, f_samples, sys, dom, xi, 3, Lp(2.0), tiny), BudgetError);
}

TEST_CASE("algorithm2 equals an independently ordered exhaustive search") {
  GridDomain dom = GridDomain::uniform(64);
  FunctionSystem sys = FunctionSystem::trig(8, dom);
  SampleSet xi = SampleSet::random(20, 77);
  const CMat at_samples = sys.matrix_at(xi);
  const std::vector<double> w = xi.counting_weights();
  Rng rng(15);

  for (int rep = 0; rep < 8; ++rep) {
    CVec f(20);
    for (std::size_t nu = 0; nu < 20; ++nu) {
      f[nu] = sys.evaluate(rep % 8, xi.coord(nu)) + 0.2 * rng.normal_complex();
    }
    for (std::size_t v : {std::size_t(1), std::size_t(2)}) {
      const RecoveryOutcome out = algorithm2(f, sys, xi, v, Lp(2.0));

      // reversed-order exhaustive oracle with (error, support) ordering
      std::vector<std::pair<double, std::vector<std::size_t>>> evaluated;
      SubsetEnumerator en(8, v);
      std::vector<std::size_t> J;
      while (en.next(J)) {
        const CMat sub = at_samples.select_cols(J);
        evaluated.emplace_back(lpw_recover(f, sub, Lp(2.0), w).residual_norm, J);
      }
      std::reverse(evaluated.begin(), evaluated.end());
      double best = std::numeric_limits<double>::infinity();
      std::vector<std::size_t> best_support;
      for (const auto& [err,supp] : evaluated) {
        if (err < best || (err == best && supp < best_support)) {
          best = err;
          best_support = supp;
        }
      }
      CHECK(out.support == best_support);
      CHECK(out.error_sample == best);  // bitwise: same projections, same min

      // algorithm2's sample error equals the sample-norm sigma_v oracle exactly
      const CVec f_grid(dom.size(), 0.0);
      const SigmaResult sig =
          sigma_v_oracle(f_grid, &f, sys, dom, &xi, v, NormSpec::sample(Lp(2.0)));
      CHECK(out.error_sample == sig.value);
      CHECK(out.support == sig.support);
    }
  }
}

TEST_CASE("sigma_v oracle basics") {
  GridDomain dom = GridDomain::uniform(64);
  FunctionSystem sys = FunctionSystem::trig(6, dom);
  SampleSet xi = SampleSet::uniform(12);

  // orthonormal sampling: sigma_1 of phi_1 + 0.1 phi_2 is exactly 0.1
  SparseElement f({1, 2}, {1.0, 0.1});
  const CVec fg = evaluate_sparse(f, sys, dom);
  const CVec fs = evaluate_sparse(f, sys, xi);
  const SigmaResult s1 = sigma_v_oracle(fg, &fs, sys, dom, &xi, 1, NormSpec::sample(Lp(2.0)));
  CHECK(s1.value == doctest::Approx(0.1).epsilon(1e-10));
  CHECK(s1.support == std::vector<std::size_t>{1});

  // v >= true sparsity: zero
  const SigmaResult s2 = sigma_v_oracle(fg, &fs, sys, dom, &xi, 2, NormSpec::sample(Lp(2.0)));
  CHECK(s2.value < 1e-12);
  const SigmaResult s2c = sigma_v_oracle(fg, nullptr, sys, dom, nullptr, 2,
                                         NormSpec::continuous(Lp(4.0)));
  CHECK(s2c.value < 1e-8);
}

TEST_CASE("sigma_v continuous p=4 matches a dense coefficient sweep") {
  GridDomain dom = GridDomain::uniform(64);
  FunctionSystem sys = FunctionSystem::trig(4, dom);
  CVec fg(dom.size(), 0.0);
  for (std::size_t j = 0; j < 3; ++j) {
    kern::axpy(1.0, sys.grid_matrix().col(j), fg.data(), fg.size());
  }
  const SigmaResult got = sigma_v_oracle(fg, nullptr, sys, dom, nullptr, 2,
                                         NormSpec::continuous(Lp(4.0)));

  // oracle: per support, refine a real coefficient grid (the minimizer has
  // real coefficients by the conjugation symmetry of this input)
  const std::vector<double> w(dom.weights().begin(), dom.weights().end());
  double sweep_best = 1e300;
  SubsetEnumerator en(4, 2);
  std::vector<std::size_t> J;
  while (en.next(J)) {
    const CMat sub = sys.grid_matrix().select_cols(J);
    double ca = 0.5, cb = 0.5, radius = 1.0;
    double local = 1e300;
    for (int level = 0; level < 4; ++level) {
      double na = ca, nb = cb;
      for (int ia = -20; ia <= 20; ++ia) {
        for (int ib = -20; ib <= 20; ++ib) {
          const double a = ca + radius * ia / 20.0;
          const double b = cb + radius * ib / 20.0;
          CVec r = fg;
          kern::axpy(cplx{-a, 0.0}, sub.col(0), r.data(), r.size());
          kern::axpy(cplx{-b, 0.0}, sub.col(1), r.data(), r.size());
          const double err = weighted_lp(r, w, Lp(4.0));
          if (err < local) {
            local = err;
            na = a;
            nb = b;
          }
        }
      }
      ca = na;
      cb = nb;
      radius /= 10.0;
    }
    sweep_best = std::min(sweep_best, local);
  }
  CHECK(std::abs(got.value - sweep_best) < 1e-4);
}

TEST_CASE("interpolating fit on certified points recovers exactly on the grid") {
  GridDomain dom = GridDomain::uniform(64);
  FunctionSystem sys = FunctionSystem::trig(6, dom);
  SampleSet xi = SampleSet::uniform(16);
  SparseElement f({3}, {cplx{0.7, -0.4}});
  const CVec fg = evaluate_sparse(f, sys, dom);
  const CVec fs = evaluate_sparse(f, sys, xi);
  const RecoveryOutcome out = algorithm2(fs, sys, xi, 1, Lp(2.0));
  // interpolation at every sample point
  const CMat sub = sys.matrix_at(xi).select_cols(out.support);
  const CVec r = residual_values(fs, sub, out.coeffs);
  CHECK(std::sqrt(kern::max_abs2(r.data(), r.size())) < 1e-10);
  // and equality on the whole grid
  const CMat gsub = sys.grid_matrix().select_cols(out.support);
  const CVec rg = residual_values(fg, gsub, out.coeffs);
  CHECK(std::sqrt(kern::max_abs2(rg.data(), rg.size())) < 1e-8);
}

TEST_CASE("lebesgue ratio conventions") {
  std::vector<std::pair<double, double>> pairs = {
      {0.0, 0.0},    // exact pair -> ratio 1
      {0.2, 0.1},    // plain ratio 2
      {1e-12, 0.0},  // still exact
      {0.5, 0.25},   // ratio 2
  };
  const LebesgueReport rep = empirical_lebesgue_constants(pairs);
  CHECK(rep.rows[0].exact_pair);
  CHECK(rep.rows[0].ratio == 1.0);
  CHECK(rep.rows[1].ratio == doctest::Approx(2.0));
  CHECK(rep.exact_failures == 0);
  CHECK(rep.max_ratio == doctest::Approx(2.0));
  CHECK(rep.median_ratio == doctest::Approx(1.5));

  std::vector<std::pair<double, double>> bad = {{0.5, 0.0}};
  const LebesgueReport rep2 = empirical_lebesgue_constants(bad);
  CHECK(rep2.exact_failures == 1);
  CHECK(std::isinf(rep2.rows[0].ratio));
}
