#pragma once

#include <optional>
#include <utility>

#include "sparec/solver.hpp"
#include "sparec/systems.hpp"

namespace sparec {

/// Lexicographic enumeration of all v-element subsets of {0..N-1}.
class SubsetEnumerator {
 public:
  SubsetEnumerator(std::size_t N, std::size_t v);

  /// Fills `subset` with the next combination; false when exhausted.
  bool next(std::vector<std::size_t>& subset);

  /// C(N, v) as a double (inf-safe for budget checks).
  static double count(std::size_t N, std::size_t v);

 private:
  std::size_t N_, v_;
  std::vector<std::size_t> current_;
  bool started_ = false;
  bool done_ = false;
};

struct CombiOptions {
  std::size_t subset_budget = 100000;
  SolverOptions solver{};
};

struct RecoveryOutcome {
  std::vector<std::size_t> support;
  CVec coeffs;
  std::optional<double> error_continuous;  // only when grid values were used
  double error_sample = 0.0;
  std::size_t subsets_examined = 0;

  nlohmann::json to_json() const;
};

/// Algorithm 1: minimize the continuous L_p(mu) error of the per-subset
/// sample-norm fits over all v-element supports.
RecoveryOutcome algorithm1(const CVec& f_grid, const CVec& f_samples, const FunctionSystem& sys,
                           const GridDomain& dom, const SampleSet& xi, std::size_t v, Lp p,
                           const CombiOptions& opts = {});

/// Algorithm 2: same sweep but the selection criterion is the sample norm;
/// the result is the best v-term approximation B_v(f, D_N, L_p(xi)).
RecoveryOutcome algorithm2(const CVec& f_samples, const FunctionSystem& sys, const SampleSet& xi,
                           std::size_t v, Lp p, const CombiOptions& opts = {});

/// Which norm sigma_v is measured in.
struct NormSpec {
  enum class Kind { continuous, sample, sup, mixed };
  Kind kind = Kind::continuous;
  Lp p{2.0};

  static NormSpec continuous(Lp p) { return {Kind::continuous, p}; }
  static NormSpec sample(Lp p) { return {Kind::sample, p}; }
  static NormSpec sup() { return {Kind::sup, Lp(2.0)}; }
  static NormSpec mixed(Lp p) { return {Kind::mixed, p}; }
};

struct SigmaResult {
  double value = 0.0;
  std::vector<std::size_t> support;
};

/// Exhaustive best v-term approximation error. `f_samples`/`xi` are required
/// for the sample and mixed norms and ignored otherwise.
SigmaResult sigma_v_oracle(const CVec& f_grid, const CVec* f_samples, const FunctionSystem& sys,
                           const GridDomain& dom, const SampleSet* xi, std::size_t v,
                           const NormSpec& norm, const CombiOptions& opts = {});

struct LebesgueRow {
  double error = 0.0;
  double sigma = 0.0;
  double ratio = 0.0;
  bool exact_pair = false;        // error ~ 0 and sigma ~ 0: ratio 1 by convention
  bool exact_failure = false;     // sigma ~ 0 but error > 0
};

struct LebesgueReport {
  std::vector<LebesgueRow> rows;
  double max_ratio = 0.0;
  double median_ratio = 0.0;
  std::size_t exact_failures = 0;
};

/// Per-run error/sigma ratios with the exact-recovery convention.
LebesgueReport empirical_lebesgue_constants(std::span<const std::pair<double, double>> err_sigma,
                                            double exact_tol = 1e-9);

}  // namespace sparec
