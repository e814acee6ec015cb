#include "sparec/combinatorial.hpp"

#include <algorithm>
#include <cmath>

#include "sparec/kernels.hpp"

namespace sparec {

SubsetEnumerator::SubsetEnumerator(std::size_t N, std::size_t v) : N_(N), v_(v) {
  if (v > N) throw DomainError("SubsetEnumerator: v must be <= N");
  current_.resize(v);
}

bool SubsetEnumerator::next(std::vector<std::size_t>& subset) {
  if (done_) return false;
  if (!started_) {
    for (std::size_t i = 0; i < v_; ++i) current_[i] = i;
    started_ = true;
    subset = current_;
    if (v_ == 0) done_ = true;
    return true;
  }
  // advance rightmost index that can move
  std::size_t i = v_;
  while (i-- > 0) {
    if (current_[i] + (v_ - i) < N_) {
      ++current_[i];
      for (std::size_t j = i + 1; j < v_; ++j) current_[j] = current_[j - 1] + 1;
      subset = current_;
      return true;
    }
  }
  done_ = true;
  return false;
}

double SubsetEnumerator::count(std::size_t N, std::size_t v) {
  if (v > N) return 0.0;
  v = std::min(v, N - v);
  double c = 1.0;
  for (std::size_t i = 0; i < v; ++i) c = c * double(N - i) / double(i + 1);
  return c;
}

nlohmann::json RecoveryOutcome::to_json() const {
  nlohmann::json j;
  j["support"] = support;
  nlohmann::json cs = nlohmann::json::array();
  for (const cplx& c : coeffs) cs.push_back({c.real(), c.imag()});
  j["coeffs"] = cs;
  if (error_continuous) j["error_continuous"] = *error_continuous;
  j["error_sample"] = error_sample;
  j["subsets_examined"] = subsets_examined;
  return j;
}

namespace {

void check_budget(std::size_t N, std::size_t v, std::size_t budget) {
  const double c = SubsetEnumerator::count(N, v);
  if (c > double(budget)) {
    throw BudgetError("subset enumeration would examine " + std::to_string(std::llround(c)) +
                      " supports (budget " + std::to_string(budget) + ")");
  }
}

}  // namespace

RecoveryOutcome algorithm1(const CVec& f_grid, const CVec& f_samples, const FunctionSystem& sys,
                           const GridDomain& dom, const SampleSet& xi, std::size_t v, Lp p,
                           const CombiOptions& opts) {
  if (p.is_inf()) throw DomainError("algorithm1: finite p only");
  const std::size_t N = sys.size();
  check_budget(N, v, opts.subset_budget);
  const CMat at_samples = sys.matrix_at(xi);
  const CMat& at_grid = sys.grid_matrix();
  const std::vector<double> w = xi.counting_weights();

  RecoveryOutcome best;
  double best_err = std::numeric_limits<double>::infinity();
  SubsetEnumerator en(N, v);
  std::vector<std::size_t> J;
  std::size_t examined = 0;
  while (en.next(J)) {
    ++examined;
    const CMat sub_s = at_samples.select_cols(J);
    const ProjectionResult fit = lpw_recover(f_samples, sub_s, p, w, opts.solver);
    const CMat sub_g = at_grid.select_cols(J);
    const CVec r_grid = residual_values(f_grid, sub_g, fit.coeffs);
    const double err = lp_norm_continuous(r_grid, dom, p);
    if (err < best_err) {
      best_err = err;
      best.support = J;
      best.coeffs = fit.coeffs;
      best.error_sample = fit.residual_norm;
    }
  }
  best.error_continuous = best_err;
  best.subsets_examined = examined;
  return best;
}

RecoveryOutcome algorithm2(const CVec& f_samples, const FunctionSystem& sys, const SampleSet& xi,
                           std::size_t v, Lp p, const CombiOptions& opts) {
  if (p.is_inf()) throw DomainError("algorithm2: finite p only");
  const std::size_t N = sys.size();
  check_budget(N, v, opts.subset_budget);
  const CMat at_samples = sys.matrix_at(xi);
  const std::vector<double> w = xi.counting_weights();

  RecoveryOutcome best;
  double best_err = std::numeric_limits<double>::infinity();
  SubsetEnumerator en(N, v);
  std::vector<std::size_t> J;
  std::size_t examined = 0;
  while (en.next(J)) {
    ++examined;
    const CMat sub_s = at_samples.select_cols(J);
    const ProjectionResult fit = lpw_recover(f_samples, sub_s, p, w, opts.solver);
    if (fit.residual_norm < best_err) {
      best_err = fit.residual_norm;
      best.support = J;
      best.coeffs = fit.coeffs;
      best.error_sample = fit.residual_norm;
    }
  }
  best.subsets_examined = examined;
  return best;
}

SigmaResult sigma_v_oracle(const CVec& f_grid, const CVec* f_samples, const FunctionSystem& sys,
                           const GridDomain& dom, const SampleSet* xi, std::size_t v,
                           const NormSpec& norm, const CombiOptions& opts) {
  const std::size_t N = sys.size();
  check_budget(N, v, opts.subset_budget);
  const bool needs_samples = norm.kind == NormSpec::Kind::sample || norm.kind == NormSpec::Kind::mixed;
  if (needs_samples && (f_samples == nullptr || xi == nullptr)) {
    throw DimensionError("sigma_v_oracle: sample data required for this norm");
  }

  // assemble the (target, basis, weights) triple for the requested norm
  CVec target;
  CMat basis;
  std::vector<double> weights;
  bool sup_norm = false;
  switch (norm.kind) {
    case NormSpec::Kind::continuous: {
      target = f_grid;
      basis = sys.grid_matrix();
      weights.assign(dom.weights().begin(), dom.weights().end());
      break;
    }
    case NormSpec::Kind::sample: {
      target = *f_samples;
      basis = sys.matrix_at(*xi);
      weights = xi->counting_weights();
      break;
    }
    case NormSpec::Kind::sup: {
      target = f_grid;
      basis = sys.grid_matrix();
      sup_norm = true;
      break;
    }
    case NormSpec::Kind::mixed: {
      // mu_xi = (mu + mu_m)/2 as one weighted point set
      target = f_grid;
      target.insert(target.end(), f_samples->begin(), f_samples->end());
      basis = sys.grid_matrix().vstack(sys.matrix_at(*xi));
      weights.reserve(dom.size() + xi->size());
      for (double qw : dom.weights()) weights.push_back(0.5 * qw);
      const double cw = 0.5 / double(xi->size());
      for (std::size_t nu = 0; nu < xi->size(); ++nu) weights.push_back(cw);
      break;
    }
  }

  SigmaResult best;
  best.value = std::numeric_limits<double>::infinity();
  SubsetEnumerator en(N, v);
  std::vector<std::size_t> J;
  while (en.next(J)) {
    if (J.empty()) {
      const double err = sup_norm ? std::sqrt(kern::max_abs2(target.data(), target.size()))
                                  : weighted_lp(target, weights, norm.p);
      if (err < best.value) {
        best.value = err;
        best.support = J;
      }
      continue;
    }
    const CMat sub = basis.select_cols(J);
    ProjectionProblem prob;
    prob.target = target;
    prob.basis = &sub;
    prob.weights = weights;
    double err;
    if (sup_norm) {
      prob.p = Lp::inf();
      err = project_sup(prob, opts.solver).residual_norm;
    } else {
      prob.p = norm.p;
      err = project(prob, opts.solver).residual_norm;
    }
    if (err < best.value) {
      best.value = err;
      best.support = J;
    }
  }
  return best;
}

LebesgueReport empirical_lebesgue_constants(std::span<const std::pair<double, double>> err_sigma,
                                            double exact_tol) {
  LebesgueReport rep;
  std::vector<double> ratios;
  for (const auto& [error, sigma] : err_sigma) {
    LebesgueRow row;
    row.error = error;
    row.sigma = sigma;
    if (sigma <= exact_tol) {
      if (error <= exact_tol) {
        row.exact_pair = true;
        row.ratio = 1.0;
      } else {
        row.exact_failure = true;
        row.ratio = std::numeric_limits<double>::infinity();
        ++rep.exact_failures;
      }
    } else {
      row.ratio = error / sigma;
    }
    ratios.push_back(row.ratio);
    rep.rows.push_back(row);
  }
  if (!ratios.empty()) {
    rep.max_ratio = *std::max_element(ratios.begin(), ratios.end());
    std::vector<double> sorted = ratios;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    rep.median_ratio = (n % 2 == 1) ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  }
  return rep;
}

}  // namespace sparec
