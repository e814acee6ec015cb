#pragma once

#include <optional>

#include "sparec/systems.hpp"

namespace sparec {

/// Options for the nonconvex ratio maximization used when p != 2.
struct AscentOptions {
  std::size_t restarts = 32;
  std::size_t iterations = 80;
  std::uint64_t seed = 12345;
  double initial_step = 0.5;
};

struct SubspaceConstantResult {
  double D = 1.0;       // +inf when the denominator vanishes on the subspace
  bool infinite = false;
  bool exact = false;   // true only on the p = 2 eigenvalue path
  CVec witness;         // coefficients attaining (p = 2) or found by search
};

/// sup over the subspace of ||f||_{L_p(mu)} / ||S(f, xi)||_p, where the
/// subspace is given by its columns tabulated on the grid and at the samples.
/// p = 2 is exact via the generalized eigenproblem of the two Gram matrices;
/// other p report the best ratio found by multi-start projected ascent.
SubspaceConstantResult subspace_constant(const CMat& grid_cols, const CMat& sample_cols,
                                         std::span<const double> grid_w, Lp p,
                                         const AscentOptions& asc = {});

/// General form: sup ||num.cols c||_{p,num.w} / ||den.cols c||_{p,den.w}.
struct NormedSet {
  const CMat* cols = nullptr;
  std::span<const double> w;
};
SubspaceConstantResult ratio_sup(const NormedSet& num, const NormedSet& den, Lp p,
                                 const AscentOptions& asc = {});

enum class Sided { one_sided_D, two_sided_eps };

struct DiscretizationCertificate {
  std::optional<SampleSet> xi;
  Lp p{2.0};
  std::size_t v_or_u = 0;
  Sided sided = Sided::one_sided_D;
  double constant = 1.0;  // D >= 1 or eps in [0, 1); +inf when failed
  bool exact = false;
  std::size_t subsets_checked = 0;
  std::size_t restarts = 0;

  bool ok() const;
  nlohmann::json to_json() const;
};

/// Worst constant over every support of size v_or_u (the collection
/// X_{v_or_u}(D_N)).
DiscretizationCertificate certify_universal(const SampleSet& xi, const FunctionSystem& sys,
                                            const GridDomain& dom, std::size_t v_or_u, Lp p,
                                            Sided sided, std::size_t subset_budget = 100000,
                                            const AscentOptions& asc = {});

struct SearchConfig {
  std::size_t m = 16;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  double epsilon = 0.5;   // two-sided target
  double target_D = 2.0;  // one-sided target
  bool exhaustive = false;  // run all trials even after a success
};

struct SearchOutcome {
  bool success = false;
  std::optional<DiscretizationCertificate> certificate;  // first success
  std::optional<SampleSet> points;                       // its point set
  std::vector<double> trial_constants;
  std::size_t trials_run = 0;
  std::size_t successes = 0;

  nlohmann::json to_json() const;
};

/// Draw m i.i.d. uniform points per trial and certify; trial randomness is
/// keyed by (seed, trial index).
SearchOutcome random_point_search(const FunctionSystem& sys, const GridDomain& dom, std::size_t v,
                                  Lp p, Sided sided, const SearchConfig& cfg,
                                  std::size_t subset_budget = 100000,
                                  const AscentOptions& asc = {});

/// Smallest m (by doubling then bisection) at which at least half of the
/// trials certify to the target. Throws BudgetError past m_max.
std::size_t minimal_m_estimate(const FunctionSystem& sys, const GridDomain& dom, std::size_t v,
                               Lp p, Sided sided, const SearchConfig& cfg, std::size_t m_max = 4096,
                               std::size_t subset_budget = 100000, const AscentOptions& asc = {});

}  // namespace sparec
