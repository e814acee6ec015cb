#include "sparec/solver.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "sparec/kernels.hpp"

namespace sparec {

namespace {

double default_tol(Lp p, const SolverOptions& opts) {
  if (opts.tol > 0.0) return opts.tol;
  return (!p.is_inf() && p.value() == 2.0) ? 1e-10 : 1e-8;
}

void check_problem(const ProjectionProblem& prob) {
  if (prob.basis == nullptr) throw DimensionError("project: missing basis");
  if (prob.basis->rows() != prob.target.size()) {
    throw DimensionError("project: basis rows do not match target length");
  }
  if (!prob.p.is_inf() && prob.weights.size() != prob.target.size()) {
    throw DimensionError("project: weight length mismatch");
  }
}

// B^H diag(w) B and B^H diag(w) t
void normal_equations(const CMat& B, std::span<const double> w, std::span<const cplx> t,
                      Eigen::MatrixXcd& gram, Eigen::VectorXcd& rhs) {
  const std::size_t k = B.cols(), n = B.rows();
  gram.resize(Eigen::Index(k), Eigen::Index(k));
  rhs.resize(Eigen::Index(k));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i; j < k; ++j) {
      const cplx g = kern::wdot(B.col(i), B.col(j), w.data(), n);
      gram(Eigen::Index(i), Eigen::Index(j)) = g;
      gram(Eigen::Index(j), Eigen::Index(i)) = std::conj(g);
    }
    rhs(Eigen::Index(i)) = kern::wdot(B.col(i), t.data(), w.data(), n);
  }
}

// Hermitian solve; rank-deficient Gram falls back to the minimum-norm
// solution through the eigendecomposition (deterministic tie-break).
CVec solve_normal(const Eigen::MatrixXcd& gram, const Eigen::VectorXcd& rhs, bool& degenerate) {
  const Eigen::Index k = gram.rows();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram);
  const auto& vals = eig.eigenvalues();
  const double lmax = std::max(vals(k - 1), 0.0);
  const double cutoff = lmax * 1e-13;
  degenerate = false;
  Eigen::VectorXcd y = eig.eigenvectors().adjoint() * rhs;
  for (Eigen::Index i = 0; i < k; ++i) {
    if (vals(i) > cutoff && lmax > 0.0) {
      y(i) /= vals(i);
    } else {
      y(i) = 0.0;
      degenerate = true;
    }
  }
  Eigen::VectorXcd c = eig.eigenvectors() * y;
  return CVec(c.data(), c.data() + k);
}

CVec weighted_least_squares(const CMat& B, std::span<const double> w, std::span<const cplx> t,
                            bool& degenerate) {
  Eigen::MatrixXcd gram;
  Eigen::VectorXcd rhs;
  normal_equations(B, w, t, gram, rhs);
  return solve_normal(gram, rhs, degenerate);
}

double objective_p(std::span<const cplx> r, std::span<const double> w, double p,
                   std::vector<double>& s) {
  s.resize(r.size());
  kern::abs2(r.data(), s.data(), r.size());
  return kern::wsum_powh(s.data(), w.data(), r.size(), p / 2.0);
}

// max_j |sum_nu w |r|^(p-2) conj(r) B_j|
double kkt_raw(const CMat& B, std::span<const cplx> r, std::span<const double> w, double p,
               std::vector<double>& s, std::vector<double>& dens) {
  s.resize(r.size());
  kern::abs2(r.data(), s.data(), r.size());
  dens.resize(r.size());
  kern::powh_weights(s.data(), w.data(), (p - 2.0) / 2.0, dens.data(), r.size());
  double worst = 0.0;
  for (std::size_t j = 0; j < B.cols(); ++j) {
    // conj of wdot(r, B_j, dens) is the stationarity quantity; same modulus
    worst = std::max(worst, std::abs(kern::wdot(r.data(), B.col(j), dens.data(), r.size())));
  }
  return worst;
}

struct NewtonWork {
  std::vector<double> s, dens;
  CVec r, rho;
  Eigen::MatrixXd hess;
  Eigen::VectorXd grad;
};

// One assembly of gradient and Hessian of sum w |r|^p over (Re c, Im c).
void assemble_newton(const CMat& B, std::span<const cplx> t, std::span<const double> w, double p,
                     const CVec& c, NewtonWork& wk) {
  const std::size_t n = B.rows(), k = B.cols();
  wk.r.assign(t.begin(), t.end());
  for (std::size_t j = 0; j < k; ++j) kern::axpy(-c[j], B.col(j), wk.r.data(), n);
  wk.s.resize(n);
  kern::abs2(wk.r.data(), wk.s.data(), n);

  // d = w * (p/2) * s^(p/2 - 1); q = w * (p/2)(p/2 - 1) * s^(p/2 - 2)
  std::vector<double>& d = wk.dens;
  d.resize(n);
  kern::powh_weights(wk.s.data(), w.data(), p / 2.0 - 1.0, d.data(), n);
  const double half_p = p / 2.0;

  wk.grad.setZero(Eigen::Index(2 * k));
  wk.hess.setZero(Eigen::Index(2 * k), Eigen::Index(2 * k));

  // gradient: gamma_j = sum d * half_p * conj(B_j) r
  for (std::size_t j = 0; j < k; ++j) {
    cplx gamma = kern::wdot(B.col(j), wk.r.data(), d.data(), n) * half_p;
    wk.grad(Eigen::Index(j)) = -2.0 * gamma.real();
    wk.grad(Eigen::Index(k + j)) = -2.0 * gamma.imag();
  }

  // Gauss-Newton block: Q(l,m) = sum 2 d half_p conj(B_l) B_m embeds as
  // [[Re Q, -Im Q], [Im Q, Re Q]]
  std::vector<double> two_d(n);
  for (std::size_t nu = 0; nu < n; ++nu) two_d[nu] = 2.0 * half_p * d[nu];
  for (std::size_t l = 0; l < k; ++l) {
    for (std::size_t m = l; m < k; ++m) {
      const cplx q = kern::wdot(B.col(l), B.col(m), two_d.data(), n);
      wk.hess(Eigen::Index(l), Eigen::Index(m)) = q.real();
      wk.hess(Eigen::Index(m), Eigen::Index(l)) = q.real();
      wk.hess(Eigen::Index(l), Eigen::Index(k + m)) = -q.imag();
      wk.hess(Eigen::Index(k + m), Eigen::Index(l)) = -q.imag();
      wk.hess(Eigen::Index(m), Eigen::Index(k + l)) = q.imag();
      wk.hess(Eigen::Index(k + l), Eigen::Index(m)) = q.imag();
      wk.hess(Eigen::Index(k + l), Eigen::Index(k + m)) = q.real();
      wk.hess(Eigen::Index(k + m), Eigen::Index(k + l)) = q.real();
    }
  }

  // curvature term: sum w phi''(s) vv^T with v = (ds/dx); vanishes at p = 2
  if (half_p != 1.0) {
    const double c2 = half_p * (half_p - 1.0);
    wk.rho.resize(k);
    for (std::size_t nu = 0; nu < n; ++nu) {
      const double s = wk.s[nu];
      if (s <= 0.0) continue;
      // w phi'' = c2 * w * s^(p/2-2) = c2 * d[nu] / s
      const double qv = c2 * d[nu] / s;
      if (qv == 0.0) continue;
      const cplx rc = std::conj(wk.r[nu]);
      for (std::size_t j = 0; j < k; ++j) wk.rho[j] = rc * B(nu, j);
      for (std::size_t l = 0; l < k; ++l) {
        const double va_l = -2.0 * wk.rho[l].real();
        const double vb_l = 2.0 * wk.rho[l].imag();
        for (std::size_t m = l; m < k; ++m) {
          const double va_m = -2.0 * wk.rho[m].real();
          const double vb_m = 2.0 * wk.rho[m].imag();
          wk.hess(Eigen::Index(l), Eigen::Index(m)) += qv * va_l * va_m;
          wk.hess(Eigen::Index(l), Eigen::Index(k + m)) += qv * va_l * vb_m;
          wk.hess(Eigen::Index(k + l), Eigen::Index(k + m)) += qv * vb_l * vb_m;
          if (m != l) {
            wk.hess(Eigen::Index(m), Eigen::Index(l)) += qv * va_m * va_l;
            wk.hess(Eigen::Index(k + m), Eigen::Index(l)) += qv * vb_m * va_l;
            wk.hess(Eigen::Index(k + l), Eigen::Index(m)) += qv * vb_l * va_m;
          } else {
            wk.hess(Eigen::Index(k + l), Eigen::Index(l)) += qv * vb_l * va_l;
          }
          wk.hess(Eigen::Index(m), Eigen::Index(k + l)) = wk.hess(Eigen::Index(k + l), Eigen::Index(m));
          wk.hess(Eigen::Index(k + m), Eigen::Index(l)) = wk.hess(Eigen::Index(l), Eigen::Index(k + m));
        }
      }
    }
  }
}

ProjectionResult finish_result(const CMat& B, std::span<const cplx> t, std::span<const double> w,
                               double p, CVec coeffs, std::size_t iterations, bool converged,
                               bool degenerate) {
  ProjectionResult res;
  res.coeffs = std::move(coeffs);
  CVec r(t.begin(), t.end());
  for (std::size_t j = 0; j < B.cols(); ++j) kern::axpy(-res.coeffs[j], B.col(j), r.data(), B.rows());
  res.residual_norm = weighted_lp(r, w, Lp(p));
  std::vector<double> s, dens;
  const double target_norm = weighted_lp(t, w, Lp(p));
  const double scale = std::pow(std::max(target_norm, 1e-300), p - 1.0);
  res.kkt_residual = kkt_raw(B, r, w, p, s, dens) / scale;
  res.iterations = iterations;
  res.converged = converged;
  res.degenerate = degenerate;
  return res;
}

ProjectionResult project_p2(const ProjectionProblem& prob) {
  bool degenerate = false;
  CVec c = weighted_least_squares(*prob.basis, prob.weights, prob.target, degenerate);
  ProjectionResult res =
      finish_result(*prob.basis, prob.target, prob.weights, 2.0, std::move(c), 1, true, degenerate);
  return res;
}

ProjectionResult project_irls(const ProjectionProblem& prob, const SolverOptions& opts,
                              const CVec* warm_start) {
  const CMat& B = *prob.basis;
  const double p = prob.p.value();
  const std::size_t n = B.rows(), k = B.cols();
  const double tol = default_tol(prob.p, opts);
  const double eps = (p < 2.0) ? opts.irls_epsilon : 0.0;

  bool degenerate = false;
  CVec c = warm_start ? *warm_start
                      : weighted_least_squares(B, prob.weights, prob.target, degenerate);
  std::vector<double> s, u(n), dens;
  CVec r(n);
  const double target_norm = weighted_lp(prob.target, prob.weights, Lp(p));
  const double kscale = std::pow(std::max(target_norm, 1e-300), p - 1.0);

  double best_obj = std::numeric_limits<double>::infinity();
  CVec best_c = c;
  std::size_t it = 0;
  for (; it < opts.max_iterations; ++it) {
    r.assign(prob.target.begin(), prob.target.end());
    for (std::size_t j = 0; j < k; ++j) kern::axpy(-c[j], B.col(j), r.data(), n);
    const double obj = objective_p(r, prob.weights, p, s);
    if (obj < best_obj) {
      best_obj = obj;
      best_c = c;
    }
    if (kkt_raw(B, r, prob.weights, p, s, dens) <= tol * kscale) {
      return finish_result(B, prob.target, prob.weights, p, std::move(c), it + 1, true, degenerate);
    }
    // |r|^(p-2) weights with epsilon smoothing near zero residual entries
    for (std::size_t nu = 0; nu < n; ++nu) {
      const double base = s[nu] + eps;
      u[nu] = prob.weights[nu] * std::pow(base, (p - 2.0) / 2.0);
    }
    bool deg = false;
    CVec c_next = weighted_least_squares(B, u, prob.target, deg);
    degenerate = degenerate || deg;
    // damped update if the full step overshoots
    double alpha = 1.0;
    for (int back = 0; back < 30; ++back) {
      CVec trial(k);
      for (std::size_t j = 0; j < k; ++j) trial[j] = c[j] + alpha * (c_next[j] - c[j]);
      CVec rt(prob.target.begin(), prob.target.end());
      for (std::size_t j = 0; j < k; ++j) kern::axpy(-trial[j], B.col(j), rt.data(), n);
      if (objective_p(rt, prob.weights, p, s) <= obj || alpha < 1e-8) {
        c = std::move(trial);
        break;
      }
      alpha *= 0.5;
    }
  }
  return finish_result(B, prob.target, prob.weights, p, std::move(best_c), it, false, degenerate);
}

ProjectionResult project_newton(const ProjectionProblem& prob, const SolverOptions& opts) {
  const CMat& B = *prob.basis;
  const double p = prob.p.value();
  const std::size_t n = B.rows(), k = B.cols();
  const double tol = default_tol(prob.p, opts);

  bool degenerate = false;
  CVec c = weighted_least_squares(B, prob.weights, prob.target, degenerate);
  const double target_norm = weighted_lp(prob.target, prob.weights, Lp(p));
  if (target_norm == 0.0) {
    return finish_result(B, prob.target, prob.weights, p, CVec(k, 0.0), 0, true, degenerate);
  }
  const double kscale = std::pow(target_norm, p - 1.0);

  NewtonWork wk;
  std::vector<double> s, dens;
  double lambda = 0.0;
  std::size_t it = 0;
  for (; it < opts.max_iterations; ++it) {
    assemble_newton(B, prob.target, prob.weights, p, c, wk);
    const double kk = kkt_raw(B, wk.r, prob.weights, p, s, dens);
    if (kk <= tol * kscale) {
      return finish_result(B, prob.target, prob.weights, p, std::move(c), it + 1, true, degenerate);
    }
    const double obj = kern::wsum_powh(wk.s.data(), prob.weights.data(), n, p / 2.0);

    // Levenberg-damped Newton direction
    bool stepped = false;
    for (int attempt = 0; attempt < 12 && !stepped; ++attempt) {
      Eigen::MatrixXd H = wk.hess;
      if (lambda > 0.0) {
        for (Eigen::Index i = 0; i < H.rows(); ++i) H(i, i) += lambda;
      }
      Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
      Eigen::VectorXd step = ldlt.solve(-wk.grad);
      if (!step.allFinite()) {
        lambda = (lambda == 0.0) ? 1e-8 * std::abs(wk.hess.trace()) + 1e-300 : lambda * 10.0;
        continue;
      }
      const double slope = wk.grad.dot(step);
      double alpha = 1.0;
      for (int back = 0; back < 40; ++back) {
        CVec trial(k);
        for (std::size_t j = 0; j < k; ++j) {
          trial[j] = c[j] + alpha * cplx{step(Eigen::Index(j)), step(Eigen::Index(k + j))};
        }
        CVec rt(prob.target.begin(), prob.target.end());
        for (std::size_t j = 0; j < k; ++j) kern::axpy(-trial[j], B.col(j), rt.data(), n);
        const double trial_obj = objective_p(rt, prob.weights, p, s);
        if (trial_obj <= obj + 1e-4 * alpha * slope || trial_obj < obj) {
          c = std::move(trial);
          stepped = true;
          lambda *= 0.25;
          break;
        }
        alpha *= 0.5;
      }
      if (!stepped) {
        lambda = (lambda == 0.0) ? 1e-8 * std::abs(wk.hess.trace()) + 1e-300 : lambda * 10.0;
      }
    }
    if (!stepped) {
      // Newton stalled; hand the current iterate to IRLS
      ProjectionProblem sub = prob;
      SolverOptions sub_opts = opts;
      sub_opts.max_iterations = opts.max_iterations > it ? opts.max_iterations - it : 1;
      ProjectionResult res = project_irls(sub, sub_opts, &c);
      res.iterations += it;
      return res;
    }
  }
  return finish_result(B, prob.target, prob.weights, p, std::move(c), it, false, degenerate);
}

}  // namespace

CVec fit_values(const CMat& basis, std::span<const cplx> coeffs) {
  if (coeffs.size() != basis.cols()) throw DimensionError("fit_values: coefficient count mismatch");
  CVec out(basis.rows(), 0.0);
  for (std::size_t j = 0; j < basis.cols(); ++j) kern::axpy(coeffs[j], basis.col(j), out.data(), out.size());
  return out;
}

CVec residual_values(std::span<const cplx> target, const CMat& basis,
                     std::span<const cplx> coeffs) {
  if (target.size() != basis.rows()) throw DimensionError("residual_values: length mismatch");
  CVec out(target.begin(), target.end());
  for (std::size_t j = 0; j < basis.cols(); ++j) {
    kern::axpy(-coeffs[j], basis.col(j), out.data(), out.size());
  }
  return out;
}

ProjectionResult project(const ProjectionProblem& prob, const SolverOptions& opts) {
  if (prob.p.is_inf()) return project_sup(prob, opts);
  check_problem(prob);
  const CMat& B = *prob.basis;
  bool all_zero = true;
  for (std::size_t j = 0; j < B.cols() && all_zero; ++j) {
    if (kern::max_abs2(B.col(j), B.rows()) > 0.0) all_zero = false;
  }
  if (B.cols() == 0 || all_zero) throw DegeneracyError("project: basis is empty or all-zero");
  const double p = prob.p.value();
  if (opts.method == SolverOptions::Method::irls) return project_irls(prob, opts, nullptr);
  if (opts.method == SolverOptions::Method::newton) return project_newton(prob, opts);
  if (p == 2.0) return project_p2(prob);
  if (p > 2.0) return project_newton(prob, opts);
  return project_irls(prob, opts, nullptr);
}

ProjectionResult project_sup(const ProjectionProblem& prob, const SolverOptions& opts) {
  if (prob.basis == nullptr) throw DimensionError("project_sup: missing basis");
  const CMat& B = *prob.basis;
  const std::size_t n = B.rows(), k = B.cols();
  if (n != prob.target.size()) throw DimensionError("project_sup: basis rows mismatch");
  if (k == 0) throw DegeneracyError("project_sup: empty basis");
  const double tol = default_tol(Lp::inf(), opts);

  // Lawson iteration: reweighted least squares with multiplicative updates.
  std::vector<double> lambda(n, 1.0 / double(n));
  if (!prob.weights.empty()) {
    double total = 0.0;
    for (double w : prob.weights) total += w;
    for (std::size_t nu = 0; nu < n; ++nu) lambda[nu] = prob.weights[nu] / total;
  }

  bool degenerate = false;
  CVec best_c(k, 0.0);
  double best_upper = std::numeric_limits<double>::infinity();
  double best_lower = 0.0;
  double gap = std::numeric_limits<double>::infinity();
  std::vector<double> s(n);
  std::size_t it = 0;
  for (; it < opts.max_iterations; ++it) {
    bool deg = false;
    CVec c = weighted_least_squares(B, lambda, prob.target, deg);
    degenerate = degenerate || deg;
    CVec r(prob.target.begin(), prob.target.end());
    for (std::size_t j = 0; j < k; ++j) kern::axpy(-c[j], B.col(j), r.data(), n);
    kern::abs2(r.data(), s.data(), n);
    const double upper = std::sqrt(kern::max_abs2(r.data(), n));
    // weak duality: the lambda-weighted l2 optimum lower-bounds the minimax value
    double lower2 = 0.0;
    for (std::size_t nu = 0; nu < n; ++nu) lower2 += lambda[nu] * s[nu];
    best_lower = std::max(best_lower, std::sqrt(lower2));
    if (upper < best_upper) {
      best_upper = upper;
      best_c = c;
    }
    gap = (best_upper - best_lower) / std::max(best_upper, 1e-300);
    if (best_upper <= 1e-14 * std::max(1.0, std::sqrt(kern::max_abs2(prob.target.data(), n))) ||
        gap <= tol) {
      ++it;
      break;
    }
    double total = 0.0;
    for (std::size_t nu = 0; nu < n; ++nu) {
      lambda[nu] *= std::sqrt(s[nu]);
      total += lambda[nu];
    }
    if (total <= 0.0) break;  // exact interpolation
    for (double& l : lambda) l /= total;
  }

  ProjectionResult res;
  res.coeffs = std::move(best_c);
  res.residual_norm = best_upper;
  res.iterations = it;
  res.kkt_residual = std::isfinite(gap) ? std::max(gap, 0.0) : 0.0;
  res.converged = res.kkt_residual <= tol || best_upper <= 1e-14;
  res.degenerate = degenerate;
  return res;
}

ProjectionResult lpw_recover(std::span<const cplx> f_samples, const CMat& basis_at_samples, Lp p,
                             std::span<const double> w, const SolverOptions& opts) {
  ProjectionProblem prob;
  prob.target = f_samples;
  prob.basis = &basis_at_samples;
  prob.p = p;
  prob.weights = w;
  return project(prob, opts);
}

}  // namespace sparec
