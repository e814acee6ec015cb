#include "sparec/analysis.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sparec/combinatorial.hpp"
#include "sparec/kernels.hpp"
#include "sparec/random.hpp"

namespace sparec {

nlohmann::json SystemConstants::to_json() const {
  nlohmann::json j;
  j["K"] = singular ? nlohmann::json("inf") : nlohmann::json(K);
  j["R1"] = R1;
  j["R2"] = R2;
  j["uniform_bound"] = uniform_bound;
  j["singular"] = singular;
  return j;
}

SystemConstants bessel_riesz_constants(const FunctionSystem& sys, const GridDomain& dom) {
  const CMat& A = sys.grid_matrix();
  if (A.rows() != dom.size()) throw DimensionError("bessel_riesz_constants: grid mismatch");
  const std::size_t N = A.cols();
  Eigen::MatrixXcd gram(N, N);
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = i; j < N; ++j) {
      const cplx v = kern::wdot(A.col(i), A.col(j), dom.weights().data(), A.rows());
      gram(Eigen::Index(i), Eigen::Index(j)) = v;
      gram(Eigen::Index(j), Eigen::Index(i)) = std::conj(v);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram);
  const double lmin = eig.eigenvalues()(0);
  const double lmax = eig.eigenvalues()(Eigen::Index(N - 1));
  SystemConstants c;
  c.uniform_bound = sys.uniform_bound();
  if (lmin <= 1e-13 * std::max(lmax, 0.0)) {
    c.singular = true;
    c.K = std::numeric_limits<double>::infinity();
    c.R1 = 0.0;
    c.R2 = std::sqrt(std::max(lmax, 0.0));
    return c;
  }
  c.K = 1.0 / lmin;
  c.R1 = std::sqrt(lmin);
  c.R2 = std::sqrt(lmax);
  return c;
}

double incoherence_fast(double K, double D) {
  if (!(K > 0.0) || !(D > 0.0)) throw DomainError("incoherence_fast: K and D must be positive");
  return D * std::sqrt(K);
}

double incoherence_brute_lower_bound(const CMat& cols, std::span<const double> w, Lp p,
                                     std::size_t v, std::size_t S,
                                     const BruteIncoherenceOptions& opts) {
  if (S > cols.cols()) throw DomainError("incoherence_brute_lower_bound: S exceeds system size");
  if (v > S || v == 0) throw DomainError("incoherence_brute_lower_bound: need 1 <= v <= S");
  double total = 0.0;
  for (std::size_t size = 1; size <= S; ++size) total += SubsetEnumerator::count(cols.cols(), size);
  if (total > double(opts.subset_budget)) {
    throw BudgetError("incoherence_brute_lower_bound: subset budget exceeded");
  }

  double best = 0.0;
  CVec combo(cols.rows());
  std::uint64_t stream = 0;
  for (std::size_t size = 1; size <= S; ++size) {
    SubsetEnumerator en(cols.cols(), size);
    std::vector<std::size_t> B;
    while (en.next(B)) {
      Rng rng = Rng::keyed(opts.seed, stream++);
      for (std::size_t rep = 0; rep < opts.samples_per_subset; ++rep) {
        CVec c = rng.normal_complex_vector(size);
        std::fill(combo.begin(), combo.end(), cplx{0.0, 0.0});
        for (std::size_t i = 0; i < size; ++i) {
          kern::axpy(c[i], cols.col(B[i]), combo.data(), combo.size());
        }
        const double den_norm = weighted_lp(combo, w, p);
        if (den_norm <= 0.0) continue;
        // best A given c: the a largest moduli, a = 1..v
        std::vector<double> mags(size);
        for (std::size_t i = 0; i < size; ++i) mags[i] = std::abs(c[i]);
        std::sort(mags.begin(), mags.end(), std::greater<>());
        double acc = 0.0;
        for (std::size_t a = 1; a <= std::min(v, size); ++a) {
          acc += mags[a - 1];
          best = std::max(best, acc / (std::sqrt(double(a)) * den_norm));
        }
      }
    }
  }
  return best;
}

nlohmann::json SmoothnessReport::to_json() const {
  return {{"p", p},
          {"samples", samples},
          {"dim", dim},
          {"violations", violations},
          {"max_slack", max_slack}};
}

SmoothnessReport smoothness_modulus_check(double p, std::size_t num_samples, std::size_t dim,
                                          std::uint64_t seed) {
  if (p < 2.0) throw DomainError("smoothness_modulus_check: requires p >= 2");
  if (dim == 0) throw DomainError("smoothness_modulus_check: need dim >= 1");
  SmoothnessReport rep;
  rep.p = p;
  rep.samples = num_samples;
  rep.dim = dim;
  const std::vector<double> w(dim, 1.0 / double(dim));
  const Lp lp(p);
  Rng rng(seed);
  CVec x(dim), y(dim), plus(dim), minus(dim);
  for (std::size_t s = 0; s < num_samples; ++s) {
    for (auto& z : x) z = rng.normal_complex();
    for (auto& z : y) z = rng.normal_complex();
    const double nx = weighted_lp(x, w, lp);
    const double ny = weighted_lp(y, w, lp);
    if (nx == 0.0 || ny == 0.0) continue;
    for (auto& z : x) z /= nx;
    for (auto& z : y) z /= ny;
    const double u = rng.uniform(1e-6, 1.0);
    for (std::size_t i = 0; i < dim; ++i) {
      plus[i] = x[i] + u * y[i];
      minus[i] = x[i] - u * y[i];
    }
    const double lhs = 0.5 * (weighted_lp(plus, w, lp) + weighted_lp(minus, w, lp)) - 1.0;
    const double bound = 0.5 * (p - 1.0) * u * u;
    const double slack = lhs - bound;
    rep.max_slack = std::max(rep.max_slack, slack);
    if (slack > 1e-12) ++rep.violations;
  }
  return rep;
}

nlohmann::json StabilityReport::to_json() const {
  return {{"A_measured", A_measured},
          {"homogeneity_ok", homogeneity_ok},
          {"excluded", excluded},
          {"violations", violations}};
}

StabilityReport stability_audit(const RecoveryMap& psi, const GridDomain& dom, Lp p,
                                std::span<const StabilityInput> inputs,
                                const StabilityOptions& opts) {
  StabilityReport rep;
  Rng rng(opts.seed);
  std::size_t index = 0;
  for (const StabilityInput& in : inputs) {
    ++index;
    const double sample_norm = lp_norm_sample(in.samples, p);
    if (sample_norm == 0.0) {
      ++rep.excluded;
      continue;
    }
    const CVec out = psi(in.samples);
    const double out_norm = lp_norm_continuous(out, dom, p);
    const double ratio = out_norm / sample_norm;
    rep.A_measured = std::max(rep.A_measured, ratio);

    for (std::size_t k = 0; k < opts.scalings_per_input; ++k) {
      const double mag = std::exp(rng.uniform(-2.0, 2.0));
      const double ang = rng.uniform(0.0, 6.283185307179586);
      const cplx a = mag * cplx{std::cos(ang), std::sin(ang)};
      CVec scaled = in.samples;
      for (auto& z : scaled) z *= a;
      const double got = lp_norm_continuous(psi(scaled), dom, p);
      const double want = mag * out_norm;
      const double denom = std::max(want, 1e-300);
      if (std::abs(got - want) / denom > opts.homogeneity_tol) {
        rep.homogeneity_ok = false;
        std::ostringstream os;
        os << "input " << index << ": ||Psi(a y)|| = " << got << " vs |a| ||Psi(y)|| = " << want;
        rep.violations.push_back(os.str());
      }
    }
  }

  if (std::isfinite(opts.bound_A) && rep.A_measured > opts.bound_A) {
    std::ostringstream os;
    os << "A_measured " << rep.A_measured << " exceeds bound " << opts.bound_A;
    rep.violations.push_back(os.str());
  }

  // contrapositive of the half-error recovery statement: good recovery on the
  // unit ball forces the one-sided discretization inequality with 2A
  index = 0;
  for (const StabilityInput& in : inputs) {
    ++index;
    if (!(in.recovery_error <= 0.5) || in.f_grid.empty()) continue;
    const double f_norm = lp_norm_continuous(in.f_grid, dom, p);
    const double s_norm = lp_norm_sample(in.samples, p);
    if (s_norm == 0.0) {
      ++rep.excluded;
      continue;
    }
    if (f_norm > 2.0 * rep.A_measured * s_norm + 1e-9) {
      std::ostringstream os;
      os << "input " << index << ": ||f||_p = " << f_norm << " > 2A ||S(f)||_p = "
         << 2.0 * rep.A_measured * s_norm;
      rep.violations.push_back(os.str());
    }
  }
  return rep;
}

}  // namespace sparec
