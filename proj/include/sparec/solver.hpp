#pragma once

#include <span>

#include "sparec/cmat.hpp"
#include "sparec/domain.hpp"

namespace sparec {

/// Best approximation of `target` from the span of `basis` columns in the
/// weighted p-norm (sum_nu w_nu |.|^p)^(1/p). The weights carry the measure:
/// quadrature weights for L_p(mu), 1/m for L_p(xi, mu_m), arbitrary positive
/// w for the weighted sample norms.
struct ProjectionProblem {
  std::span<const cplx> target;
  const CMat* basis = nullptr;
  Lp p{2.0};
  std::span<const double> weights;
};

struct ProjectionResult {
  CVec coeffs;
  double residual_norm = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  /// Scale-free first-order optimality measure; for p < inf the stationarity
  /// sum_nu w |r|^(p-2) conj(r) basis_j relative to ||target||^(p-1), for the
    /// sup norm the relative duality gap of the minimax solution.
  double kkt_residual = 0.0;
  bool degenerate = false;
};

struct SolverOptions {
  double tol = 0.0;  // 0 -> 1e-10 for p == 2, 1e-8 otherwise
  std::size_t max_iterations = 300;
  double irls_epsilon = 1e-10;
  enum class Method { automatic, newton, irls };
  Method method = Method::automatic;  // cross-checking the solver paths
};

/// Weighted p-norm projection, 1 <= p < inf (p = inf delegates to
/// project_sup). Damped Newton with least-squares start for p > 2, IRLS with
/// epsilon smoothing for p < 2.
ProjectionResult project(const ProjectionProblem& prob, const SolverOptions& opts = {});

/// Minimax (uniform norm over the point set) via Lawson iteration; optimality
/// certified by the weighted-least-squares duality gap.
ProjectionResult project_sup(const ProjectionProblem& prob, const SolverOptions& opts = {});

/// The sampling recovery operator: argmin_u ||S(f - u, xi)||_{p,w}.
ProjectionResult lpw_recover(std::span<const cplx> f_samples, const CMat& basis_at_samples, Lp p,
                             std::span<const double> w, const SolverOptions& opts = {});

/// sum_j coeffs_j * basis_j
CVec fit_values(const CMat& basis, std::span<const cplx> coeffs);

/// target - sum_j coeffs_j * basis_j
CVec residual_values(std::span<const cplx> target, const CMat& basis,
                     std::span<const cplx> coeffs);

}  // namespace sparec
