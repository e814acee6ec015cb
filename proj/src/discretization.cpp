#include "sparec/discretization.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "sparec/combinatorial.hpp"
#include "sparec/kernels.hpp"
#include "sparec/random.hpp"

namespace sparec {

namespace {

Eigen::MatrixXcd weighted_gram(const CMat& B, std::span<const double> w) {
  const std::size_t k = B.cols();
  Eigen::MatrixXcd g(k, k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i; j < k; ++j) {
      const cplx v = kern::wdot(B.col(i), B.col(j), w.data(), B.rows());
      g(Eigen::Index(i), Eigen::Index(j)) = v;
      g(Eigen::Index(j), Eigen::Index(i)) = std::conj(v);
    }
  }
  return g;
}

double norm_of(const CMat& cols, std::span<const double> w, const CVec& c, Lp p, CVec& scratch) {
  scratch.assign(cols.rows(), 0.0);
  for (std::size_t j = 0; j < cols.cols(); ++j) {
    kern::axpy(c[j], cols.col(j), scratch.data(), scratch.size());
  }
  return weighted_lp(scratch, w, p);
}

// d/dconj(c) of log || cols c ||_{p,w}: (1/2) wdot(col_j, r, w |r|^(p-2)) / N^p
void log_norm_grad(const CMat& cols, std::span<const double> w, const CVec& r, double norm_p,
                   double p, CVec& grad, std::vector<double>& s, std::vector<double>& dens) {
  const std::size_t n = cols.rows();
  s.resize(n);
  kern::abs2(r.data(), s.data(), n);
  dens.resize(n);
  kern::powh_weights(s.data(), w.data(), (p - 2.0) / 2.0, dens.data(), n);
  const double np = std::pow(norm_p, p);
  for (std::size_t j = 0; j < cols.cols(); ++j) {
    grad[j] = 0.5 * kern::wdot(cols.col(j), r.data(), dens.data(), n) / np;
  }
}

void normalize(CVec& c) {
  double n2 = 0.0;
  for (const cplx& z : c) n2 += std::norm(z);
  const double inv = 1.0 / std::sqrt(n2);
  for (cplx& z : c) z *= inv;
}

}  // namespace

SubspaceConstantResult ratio_sup(const NormedSet& num, const NormedSet& den, Lp p,
                                 const AscentOptions& asc) {
  if (num.cols == nullptr || den.cols == nullptr) throw DimensionError("ratio_sup: missing columns");
  const std::size_t k = num.cols->cols();
  if (den.cols->cols() != k || k == 0) throw DimensionError("ratio_sup: column count mismatch");

  // numerator nondegenerate on its point set, else the ratio is ill-posed
  const Eigen::MatrixXcd gnum = weighted_gram(*num.cols, num.w);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> enum_(gnum);
  const double num_max = enum_.eigenvalues()(Eigen::Index(k - 1));
  if (!(num_max > 0.0) || enum_.eigenvalues()(0) <= 1e-12 * num_max) {
    throw DegeneracyError("ratio_sup: numerator columns are linearly dependent");
  }

  // denominator rank check (any p): a null direction with positive numerator
  // norm makes the ratio infinite
  const Eigen::MatrixXcd gden = weighted_gram(*den.cols, den.w);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eden(gden);
  const double den_max = std::max(eden.eigenvalues()(Eigen::Index(k - 1)), 0.0);
  const double cutoff = std::max(den_max, num_max) * 1e-13;
  if (eden.eigenvalues()(0) <= cutoff) {
    SubspaceConstantResult res;
    res.infinite = true;
    res.D = std::numeric_limits<double>::infinity();
    res.exact = !p.is_inf() && p.value() == 2.0;
    Eigen::VectorXcd nv = eden.eigenvectors().col(0);
    res.witness.assign(nv.data(), nv.data() + k);
    return res;
  }

  if (!p.is_inf() && p.value() == 2.0) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> ges(gnum, gden);
    SubspaceConstantResult res;
    res.exact = true;
    res.D = std::sqrt(std::max(ges.eigenvalues()(Eigen::Index(k - 1)), 0.0));
    Eigen::VectorXcd v = ges.eigenvectors().col(Eigen::Index(k - 1));
    res.witness.assign(v.data(), v.data() + k);
    return res;
  }

  // multi-start projected gradient ascent on log(num) - log(den); restart 0
  // warm-starts from the exact p = 2 witness
  const double pv = p.is_inf() ? 0.0 : p.value();
  if (p.is_inf()) throw DomainError("ratio_sup: sup-norm ratio not supported");

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> ges(gnum, gden);
  CVec warm(k);
  {
    Eigen::VectorXcd v = ges.eigenvectors().col(Eigen::Index(k - 1));
    for (std::size_t j = 0; j < k; ++j) warm[j] = v(Eigen::Index(j));
    normalize(warm);
  }

  SubspaceConstantResult best;
  best.D = 0.0;
  CVec scratch, r_num, r_den, grad(k), trial(k);
  std::vector<double> s, dens;
  CVec gnum_grad(k), gden_grad(k);

  auto phi_of = [&](const CVec& c, double& na, double& nb) {
    na = norm_of(*num.cols, num.w, c, p, r_num);
    nb = norm_of(*den.cols, den.w, c, p, r_den);
    if (nb <= 1e-280) return std::numeric_limits<double>::infinity();
    return std::log(na) - std::log(nb);
  };

  for (std::size_t restart = 0; restart < std::max<std::size_t>(asc.restarts, 1); ++restart) {
    Rng rng = Rng::keyed(asc.seed, restart);
    CVec c = (restart == 0) ? warm : rng.normal_complex_vector(k);
    normalize(c);
    double na, nb;
    double phi = phi_of(c, na, nb);
    if (std::isinf(phi)) {
      best.infinite = true;
      best.D = std::numeric_limits<double>::infinity();
      best.witness = c;
      return best;
    }
    double step = asc.initial_step;
    for (std::size_t it = 0; it < asc.iterations; ++it) {
      // r_num / r_den currently hold the values for c
      CVec fn = r_num, fd = r_den;
      log_norm_grad(*num.cols, num.w, fn, na, pv, gnum_grad, s, dens);
      log_norm_grad(*den.cols, den.w, fd, nb, pv, gden_grad, s, dens);
      double gn2 = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        grad[j] = gnum_grad[j] - gden_grad[j];
        gn2 += std::norm(grad[j]);
      }
      if (gn2 <= 1e-26) break;
      bool improved = false;
      while (step > 1e-12) {
        for (std::size_t j = 0; j < k; ++j) trial[j] = c[j] + step * grad[j];
        normalize(trial);
        double tna, tnb;
        const double tphi = phi_of(trial, tna, tnb);
        if (std::isinf(tphi)) {
          best.infinite = true;
          best.D = std::numeric_limits<double>::infinity();
          best.witness = trial;
          return best;
        }
        if (tphi > phi) {
          c = trial;
          phi = tphi;
          na = tna;
          nb = tnb;
          step *= 1.5;
          improved = true;
          break;
        }
        step *= 0.5;
      }
      if (!improved) break;
    }
    const double ratio = std::exp(phi);
    if (ratio > best.D) {
      best.D = ratio;
      best.witness = c;
    }
  }
  best.exact = false;
  return best;
}

SubspaceConstantResult subspace_constant(const CMat& grid_cols, const CMat& sample_cols,
                                         std::span<const double> grid_w, Lp p,
                                         const AscentOptions& asc) {
  const std::vector<double> cw(sample_cols.rows(), 1.0 / double(sample_cols.rows()));
  NormedSet num{&grid_cols, grid_w};
  NormedSet den{&sample_cols, cw};
  return ratio_sup(num, den, p, asc);
}

bool DiscretizationCertificate::ok() const {
  if (!std::isfinite(constant)) return false;
  return sided == Sided::one_sided_D || constant < 1.0;
}

nlohmann::json DiscretizationCertificate::to_json() const {
  nlohmann::json j;
  j["p"] = p.is_inf() ? nlohmann::json("inf") : nlohmann::json(p.value());
  j["v_or_u"] = v_or_u;
  j["sided"] = sided == Sided::one_sided_D ? "one_sided_D" : "two_sided_eps";
  j["constant"] = std::isfinite(constant) ? nlohmann::json(constant) : nlohmann::json("inf");
  j["exact"] = exact;
  j["subsets_checked"] = subsets_checked;
  j["restarts"] = restarts;
  j["ok"] = ok();
  if (xi) j["xi"] = xi->to_json();
  return j;
}

DiscretizationCertificate certify_universal(const SampleSet& xi, const FunctionSystem& sys,
                                            const GridDomain& dom, std::size_t v_or_u, Lp p,
                                            Sided sided, std::size_t subset_budget,
                                            const AscentOptions& asc) {
  const std::size_t N = sys.size();
  if (SubsetEnumerator::count(N, v_or_u) > double(subset_budget)) {
    throw BudgetError("certify_universal: subset budget exceeded");
  }
  const CMat at_samples = sys.matrix_at(xi);
  const CMat& at_grid = sys.grid_matrix();
  const std::vector<double> cw = xi.counting_weights();

  DiscretizationCertificate cert;
  cert.xi = xi;
  cert.p = p;
  cert.v_or_u = v_or_u;
  cert.sided = sided;
  cert.exact = !p.is_inf() && p.value() == 2.0;
  cert.restarts = (!p.is_inf() && p.value() == 2.0) ? 0 : asc.restarts;

  double worst = 0.0;
  SubsetEnumerator en(N, v_or_u);
  std::vector<std::size_t> J;
  while (en.next(J)) {
    ++cert.subsets_checked;
    const CMat sub_g = at_grid.select_cols(J);
    const CMat sub_s = at_samples.select_cols(J);
    if (sided == Sided::one_sided_D) {
      const SubspaceConstantResult r = subspace_constant(sub_g, sub_s, dom.weights(), p, asc);
      if (r.infinite) {
        cert.constant = std::numeric_limits<double>::infinity();
        return cert;
      }
      worst = std::max(worst, r.D);
    } else {
      // range of sample^p / continuous^p over the subspace; probe the
      // vanishing-sample direction first so rank-deficient sampling reports
      // a failed certificate instead of a degeneracy error
      NormedSet cont{&sub_g, dom.weights()};
      NormedSet samp{&sub_s, cw};
      const SubspaceConstantResult down = ratio_sup(cont, samp, p, asc);
      if (down.infinite) {
        cert.constant = 1.0;
        return cert;
      }
      const SubspaceConstantResult up = ratio_sup(samp, cont, p, asc);
      const double pv = p.value();
      const double hi = std::pow(up.D, pv);
      const double lo = std::pow(1.0 / down.D, pv);
      worst = std::max({worst, hi - 1.0, 1.0 - lo});
    }
  }
  // one-sided constants are reported as D >= 1 (the inequality is trivial
  // below 1); two-sided as the epsilon deviation
  cert.constant = (sided == Sided::one_sided_D) ? std::max(worst, 1.0) : worst;
  return cert;
}

nlohmann::json SearchOutcome::to_json() const {
  nlohmann::json j;
  j["success"] = success;
  j["trials_run"] = trials_run;
  j["successes"] = successes;
  j["success_rate"] = trials_run ? double(successes) / double(trials_run) : 0.0;
  nlohmann::json tc = nlohmann::json::array();
  for (double c : trial_constants) {
    tc.push_back(std::isfinite(c) ? nlohmann::json(c) : nlohmann::json("inf"));
  }
  j["trial_constants"] = tc;
  if (certificate) j["certificate"] = certificate->to_json();
  return j;
}

SearchOutcome random_point_search(const FunctionSystem& sys, const GridDomain& dom, std::size_t v,
                                  Lp p, Sided sided, const SearchConfig& cfg,
                                  std::size_t subset_budget, const AscentOptions& asc) {
  if (cfg.trials == 0) throw DomainError("random_point_search: need trials >= 1");
  SearchOutcome out;
  for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
    Rng rng = Rng::keyed(cfg.seed, trial);
    std::vector<double> pts(cfg.m);
    for (auto& x : pts) x = rng.uniform();
    SampleSet xi(std::move(pts), 1);
    DiscretizationCertificate cert =
        certify_universal(xi, sys, dom, v, p, sided, subset_budget, asc);
    ++out.trials_run;
    out.trial_constants.push_back(cert.constant);
    const bool hit = cert.ok() && (sided == Sided::one_sided_D ? cert.constant <= cfg.target_D
                                                               : cert.constant <= cfg.epsilon);
    if (hit) {
      ++out.successes;
      if (!out.success) {
        out.success = true;
        out.certificate = cert;
        out.points = xi;
      }
      if (!cfg.exhaustive) break;
    }
  }
  return out;
}

std::size_t minimal_m_estimate(const FunctionSystem& sys, const GridDomain& dom, std::size_t v,
                               Lp p, Sided sided, const SearchConfig& cfg, std::size_t m_max,
                               std::size_t subset_budget, const AscentOptions& asc) {
  auto majority_success = [&](std::size_t m) {
    SearchConfig c = cfg;
    c.m = m;
    c.exhaustive = true;
    // key the point streams by (seed, m) so every probe is reproducible
    c.seed = cfg.seed ^ (0x9e3779b97f4a7c15ull * (m + 1));
    const SearchOutcome out = random_point_search(sys, dom, v, p, sided, c, subset_budget, asc);
    return 2 * out.successes >= cfg.trials;
  };

  // m < v can never certify (dimension count), so v is the floor
  std::size_t lo = std::max<std::size_t>(v, 1);
  if (majority_success(lo)) return lo;
  std::size_t hi = 2 * lo;
  while (true) {
    if (hi > m_max) throw BudgetError("minimal_m_estimate: bisection range exhausted");
    if (majority_success(hi)) break;
    lo = hi;
    hi *= 2;
  }
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (majority_success(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace sparec
