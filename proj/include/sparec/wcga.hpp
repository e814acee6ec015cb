#pragma once

#include <cstdint>
#include <string>

#include "sparec/solver.hpp"
#include "sparec/systems.hpp"

namespace sparec {

/// Weak Chebyshev Greedy Algorithm in L_p(xi, mu_m), p in [2, inf).
struct WcgaConfig {
  double t = 1.0;  // weakness parameter in (0, 1]
  Lp p{2.0};
  std::size_t max_iterations = 64;
  double residual_tol = 1e-10;  // absolute threshold on ||f_m||_{L_p(xi)}
  double budget_constant_c = 1.0;
  // the recovery map is homogeneous only up to the projection accuracy, so
  // the Chebyshev steps run tighter than the standalone solver default
  SolverOptions solver = tight_solver();

  static SolverOptions tight_solver() {
    SolverOptions s;
    s.tol = 1e-12;
    return s;
  }
};

enum class StopReason { tol, budget, stall };

const char* stop_reason_name(StopReason r);

struct WcgaTrace {
  std::vector<std::size_t> selected;   // psi_1, psi_2, ... (dictionary indices)
  std::vector<double> residual_norms;  // [0] = ||f_0||, [k] after k projections
  CVec coeffs;                         // G_m coefficients, aligned with `selected`
  StopReason stopped = StopReason::budget;

  nlohmann::json to_json() const;
};

/// F_f(g) for the L_p peak functional of f: ||f||^(1-p) sum w |f|^(p-2) conj(f) g.
cplx norming_functional(const FunctionValues& f, const FunctionValues& g, Lp p,
                        std::span<const double> w);

/// Smallest index j with |F_residual(phi_j)| >= t * max_k |F_residual(phi_k)|.
/// Throws DomainError when every functional value vanishes (stall signal).
std::size_t greedy_select(const FunctionValues& residual, const CMat& sys_at_samples, double t,
                          Lp p, std::span<const double> w);

/// Run the WCGA on a dictionary already restricted to the sample points.
/// Columns with sample norm above 1 are scaled to norm 1 for the run and the
/// output coefficients are rescaled back.
WcgaTrace wcga_run(const FunctionValues& f0_samples, const CMat& dict_at_samples,
                   const WcgaConfig& cfg);

WcgaTrace wcga_run(const FunctionValues& f0_samples, const FunctionSystem& sys,
                   const SampleSet& xi, const WcgaConfig& cfg);

/// ceil(c * V^2 * ln(max(V v, e)) * v) with V = D sqrt(K); 0 when c = 0.
std::size_t iteration_budget(std::size_t v, double D, double K, const WcgaConfig& cfg);

}  // namespace sparec
