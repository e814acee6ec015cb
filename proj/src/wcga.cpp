#include "sparec/wcga.hpp"

#include <algorithm>
#include <cmath>

#include "sparec/kernels.hpp"

namespace sparec {

namespace {

// |F_residual(phi_j)| for all columns, up to the common positive factor
// ||f||^(1-p); the threshold comparison is invariant under that factor.
std::vector<double> functional_moduli(const FunctionValues& f, const CMat& dict, double p,
                                      std::span<const double> w) {
  const std::size_t n = f.size();
  std::vector<double> s(n), dens(n);
  kern::abs2(f.data(), s.data(), n);
  kern::powh_weights(s.data(), w.data(), (p - 2.0) / 2.0, dens.data(), n);
  std::vector<double> vals(dict.cols());
  for (std::size_t j = 0; j < dict.cols(); ++j) {
    vals[j] = std::abs(kern::wdot(f.data(), dict.col(j), dens.data(), n));
  }
  return vals;
}

}  // namespace

const char* stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::tol:
      return "tol";
    case StopReason::budget:
      return "budget";
    case StopReason::stall:
      return "stall";
  }
  return "?";
}

nlohmann::json WcgaTrace::to_json() const {
  nlohmann::json j;
  j["selected"] = selected;
  j["residual_norms"] = residual_norms;
  nlohmann::json cs = nlohmann::json::array();
  for (const cplx& c : coeffs) cs.push_back({c.real(), c.imag()});
  j["coeffs"] = cs;
  j["stopped"] = stop_reason_name(stopped);
  return j;
}

cplx norming_functional(const FunctionValues& f, const FunctionValues& g, Lp p,
                        std::span<const double> w) {
  if (p.is_inf() || p.value() < 2.0) {
    throw DomainError("norming_functional: requires 2 <= p < inf");
  }
  if (f.size() != g.size() || f.size() != w.size()) {
    throw DimensionError("norming_functional: length mismatch");
  }
  const double pv = p.value();
  const double nf = weighted_lp(f, w, p);
  if (nf == 0.0) throw DomainError("norming_functional: undefined for f = 0");
  const std::size_t n = f.size();
  std::vector<double> s(n), dens(n);
  kern::abs2(f.data(), s.data(), n);
  kern::powh_weights(s.data(), w.data(), (pv - 2.0) / 2.0, dens.data(), n);
  const cplx acc = kern::wdot(f.data(), g.data(), dens.data(), n);
  return std::pow(nf, 1.0 - pv) * acc;
}

std::size_t greedy_select(const FunctionValues& residual, const CMat& sys_at_samples, double t,
                          Lp p, std::span<const double> w) {
  if (!(t > 0.0 && t <= 1.0)) throw DomainError("greedy_select: weakness t must be in (0,1]");
  if (p.is_inf() || p.value() < 2.0) throw DomainError("greedy_select: requires 2 <= p < inf");
  const std::vector<double> vals = functional_moduli(residual, sys_at_samples, p.value(), w);
  const double top = *std::max_element(vals.begin(), vals.end());
  if (top == 0.0) {
    throw DomainError("greedy_select: all functional values vanish (orthogonality stall)");
  }
  const double threshold = t * top;
  for (std::size_t j = 0; j < vals.size(); ++j) {
    if (vals[j] >= threshold) return j;
  }
  return std::size_t(vals.size() - 1);  // unreachable: the argmax passes
}

WcgaTrace wcga_run(const FunctionValues& f0_samples, const CMat& dict_at_samples,
                   const WcgaConfig& cfg) {
  if (dict_at_samples.rows() != f0_samples.size()) {
    throw DimensionError("wcga_run: dictionary rows do not match sample vector");
  }
  if (!(cfg.t > 0.0 && cfg.t <= 1.0)) throw DomainError("wcga_run: weakness t must be in (0,1]");
  if (cfg.p.is_inf() || cfg.p.value() < 2.0) throw DomainError("wcga_run: requires 2 <= p < inf");

  const std::size_t m = f0_samples.size();
  const std::size_t N = dict_at_samples.cols();
  const double pv = cfg.p.value();
  const std::vector<double> w(m, 1.0 / double(m));

  // the WCGA definition requires ||g|| <= 1; scale oversized columns down
  CMat dict = dict_at_samples;
  std::vector<double> scale(N, 1.0);
  for (std::size_t j = 0; j < N; ++j) {
    const double nj = weighted_lp(dict.col_span(j), w, cfg.p);
    if (nj > 1.0) {
      scale[j] = nj;
      const cplx inv = 1.0 / nj;
      for (std::size_t nu = 0; nu < m; ++nu) dict(nu, j) *= inv;
    }
  }

  WcgaTrace trace;
  trace.residual_norms.push_back(weighted_lp(f0_samples, w, cfg.p));
  if (trace.residual_norms[0] <= cfg.residual_tol) {
    trace.stopped = StopReason::tol;
    return trace;
  }

  FunctionValues residual = f0_samples;
  std::vector<bool> used(N, false);
  std::vector<std::size_t> support;
  CVec coeffs;
  double current_norm = trace.residual_norms[0];
  trace.stopped = StopReason::budget;

  for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
    // step (1): greedy selection by the norming functional of the residual,
    // skipping spent indices (their functional values are ~0 after projection)
    const std::vector<double> vals = functional_moduli(residual, dict, pv, w);
    double top = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
      if (!used[j] && vals[j] > top) top = vals[j];
    }
    if (top == 0.0) {
      trace.stopped = StopReason::stall;
      break;
    }
    std::size_t pick = N;
    const double threshold = cfg.t * top;
    for (std::size_t j = 0; j < N; ++j) {
      if (!used[j] && vals[j] >= threshold) {
        pick = j;
        break;
      }
    }
    used[pick] = true;
    support.push_back(pick);

    // step (2): Chebyshev projection of f_0 onto span{psi_1..psi_m}
    const CMat sub = dict.select_cols(support);
    ProjectionProblem prob;
    prob.target = f0_samples;
    prob.basis = &sub;
    prob.p = cfg.p;
    prob.weights = w;
    const ProjectionResult fit = project(prob, cfg.solver);

    // step (3): f_m = f_0 - G_m; keep the better of old and new approximant
    // so the recorded norms are non-increasing even with an inexact solver
    if (fit.residual_norm <= current_norm) {
      coeffs = fit.coeffs;
      residual = residual_values(f0_samples, sub, coeffs);
      current_norm = fit.residual_norm;
    } else {
      coeffs.push_back(0.0);
    }
    trace.selected.push_back(pick);
    trace.residual_norms.push_back(current_norm);
    if (current_norm <= cfg.residual_tol) {
      trace.stopped = StopReason::tol;
      break;
    }
  }

  // undo the dictionary normalization
  trace.coeffs = coeffs;
  for (std::size_t i = 0; i < trace.coeffs.size(); ++i) {
    trace.coeffs[i] /= scale[trace.selected[i]];
  }
  return trace;
}

WcgaTrace wcga_run(const FunctionValues& f0_samples, const FunctionSystem& sys,
                   const SampleSet& xi, const WcgaConfig& cfg) {
  return wcga_run(f0_samples, sys.matrix_at(xi), cfg);
}

std::size_t iteration_budget(std::size_t v, double D, double K, const WcgaConfig& cfg) {
  if (v == 0) throw DomainError("iteration_budget: need v >= 1");
  if (cfg.budget_constant_c == 0.0) return 0;
  const double V = D * std::sqrt(K);
  const double lg = std::log(std::max(V * double(v), std::exp(1.0)));
  return std::size_t(std::ceil(cfg.budget_constant_c * V * V * lg * double(v)));
}

}  // namespace sparec
