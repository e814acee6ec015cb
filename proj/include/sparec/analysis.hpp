#pragma once

#include <functional>
#include <limits>

#include "sparec/discretization.hpp"
#include "sparec/systems.hpp"

namespace sparec {

struct SystemConstants {
  double K = 1.0;   // Bessel: sum |a|^2 <= K ||sum a phi||_2^2
  double R1 = 1.0;  // Riesz lower
  double R2 = 1.0;  // Riesz upper
  double uniform_bound = 1.0;
  bool singular = false;  // Gram not invertible: K infinite, Riesz fails

  nlohmann::json to_json() const;
};

/// K, R1, R2 from the continuous L_2(mu) Gram matrix on the grid.
SystemConstants bessel_riesz_constants(const FunctionSystem& sys, const GridDomain& dom);

/// Fast incoherence constant V = D sqrt(K) (r = 1/2).
double incoherence_fast(double K, double D = 1.0);

struct BruteIncoherenceOptions {
  std::size_t samples_per_subset = 1000;
  std::uint64_t seed = 7;
  std::size_t subset_budget = 100000;
};

/// Empirical lower bound on the incoherence constant: randomized maximization
/// of sum_A |c| / (|A|^(1/2) || sum_B c g ||_{p,w}) over nested supports with
/// |A| <= v, |B| <= S.
double incoherence_brute_lower_bound(const CMat& cols, std::span<const double> w, Lp p,
                                     std::size_t v, std::size_t S,
                                     const BruteIncoherenceOptions& opts = {});

struct SmoothnessReport {
  double p = 2.0;
  std::size_t samples = 0;
  std::size_t dim = 0;
  std::size_t violations = 0;
  double max_slack = -std::numeric_limits<double>::infinity();  // lhs - bound, worst case

  nlohmann::json to_json() const;
};

/// Monte Carlo check of (||x+uy|| + ||x-uy||)/2 - 1 <= (p-1)u^2/2 + 1e-12 for
/// unit x, y in a dim-point discrete L_p space.
SmoothnessReport smoothness_modulus_check(double p, std::size_t num_samples, std::size_t dim,
                                          std::uint64_t seed);

/// A recovery map takes the sample vector S(f, xi) to function values on the
/// reference grid.
using RecoveryMap = std::function<CVec(const CVec&)>;

struct StabilityInput {
  CVec samples;
  CVec f_grid;  // optional: enables the recovery-error stability check
  double recovery_error = std::numeric_limits<double>::quiet_NaN();
};

struct StabilityOptions {
  double bound_A = std::numeric_limits<double>::infinity();  // e.g. 2D for WCGA maps
  double homogeneity_tol = 1e-8;
  std::size_t scalings_per_input = 2;
  std::uint64_t seed = 11;
};

struct StabilityReport {
  double A_measured = 0.0;
  bool homogeneity_ok = true;
  std::size_t excluded = 0;  // zero-sample-norm inputs
  std::vector<std::string> violations;

  nlohmann::json to_json() const;
};

/// Measures the stability constant A = max ||Psi(S(f,xi))||_{L_p(mu)} /
/// ||S(f,xi)||_p, audits absolute homogeneity under random complex scalings,
/// checks A against bound_A when finite, and for inputs with recovery error
/// <= 1/2 on the unit ball verifies ||f||_p <= 2 A ||S(f,xi)||_p.
StabilityReport stability_audit(const RecoveryMap& psi, const GridDomain& dom, Lp p,
                                std::span<const StabilityInput> inputs,
                                const StabilityOptions& opts = {});

}  // namespace sparec
