#include "sparec/systems.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "sparec/kernels.hpp"
#include "sparec/random.hpp"

namespace sparec {

namespace {

constexpr double kTwoPi = 6.283185307179586476925287;

cplx unit_exp(double freq, double x) {
  const double a = kTwoPi * freq * x;
  return {std::cos(a), std::sin(a)};
}

}  // namespace

SparseElement::SparseElement(std::vector<std::size_t> idx, CVec c)
    : support(std::move(idx)), coeffs(std::move(c)) {
  if (support.size() != coeffs.size()) {
    throw DimensionError("SparseElement: support/coefficient size mismatch");
  }
  std::set<std::size_t> seen(support.begin(), support.end());
  if (seen.size() != support.size()) {
    throw DomainError("SparseElement: support indices must be distinct");
  }
}

cplx FunctionSystem::evaluate(std::size_t j, double x) const {
  if (j >= terms_.size()) throw DimensionError("FunctionSystem::evaluate: index out of range");
  cplx v = 0.0;
  for (const Term& t : terms_[j]) v += t.amp * unit_exp(t.freq, x);
  return v;
}

void FunctionSystem::finish(const GridDomain& dom) {
  if (dom.dim() != 1) throw DomainError("FunctionSystem: built-in systems are 1-d only");
  const std::size_t G = dom.size();
  const std::size_t N = terms_.size();
  grid_matrix_ = CMat(G, N);
  for (std::size_t j = 0; j < N; ++j) {
    for (std::size_t g = 0; g < G; ++g) grid_matrix_(g, j) = evaluate(j, dom.coord(g));
  }
  uniform_bound_ = 0.0;
  for (std::size_t j = 0; j < N; ++j) {
    const double b2 = kern::max_abs2(grid_matrix_.col(j), G);
    if (b2 == 0.0) throw DegeneracyError("FunctionSystem: zero column on the grid");
    uniform_bound_ = std::max(uniform_bound_, std::sqrt(b2));
  }
}

FunctionSystem FunctionSystem::trig(std::size_t N, const GridDomain& dom) {
  if (N == 0) throw DomainError("FunctionSystem::trig: need N >= 1");
  if (2 * N > dom.size()) {
    throw AliasingError("FunctionSystem::trig: N exceeds grid Nyquist (need N <= G/2)");
  }
  FunctionSystem sys;
  sys.kind_ = Kind::trig;
  sys.terms_.resize(N);
  for (std::size_t k = 0; k < N; ++k) sys.terms_[k] = {{double(k), 1.0}};
  sys.finish(dom);
  return sys;
}

FunctionSystem FunctionSystem::lacunary(std::size_t n, double b, const GridDomain& dom) {
  if (n == 0) throw DomainError("FunctionSystem::lacunary: need n >= 1");
  if (!(b > 1.0)) throw DomainError("FunctionSystem::lacunary: need ratio b > 1");
  std::vector<std::size_t> freqs(n);
  freqs[0] = 1;
  for (std::size_t j = 1; j < n; ++j) {
    freqs[j] = std::size_t(std::ceil(b * double(freqs[j - 1])));
  }
  if (2 * freqs.back() > dom.size()) {
    throw AliasingError("FunctionSystem::lacunary: top frequency exceeds grid Nyquist");
  }
  FunctionSystem sys;
  sys.kind_ = Kind::lacunary;
  sys.lacunary_b_ = b;
  sys.terms_.resize(n);
  for (std::size_t j = 0; j < n; ++j) sys.terms_[j] = {{double(freqs[j]), 1.0}};
  sys.finish(dom);
  return sys;
}

FunctionSystem FunctionSystem::perturbed(std::size_t N, double magnitude, std::uint64_t seed,
                                         const GridDomain& dom) {
  if (N == 0) throw DomainError("FunctionSystem::perturbed: need N >= 1");
  if (!(magnitude >= 0.0)) throw DomainError("FunctionSystem::perturbed: magnitude must be >= 0");
  if (2 * N > dom.size()) {
    throw AliasingError("FunctionSystem::perturbed: N exceeds grid Nyquist");
  }
  const std::size_t nyquist = dom.size() / 2;
  Rng rng(seed);
  FunctionSystem sys;
  sys.kind_ = Kind::perturbed;
  sys.perturbation_ = magnitude;
  sys.seed_ = seed;
  sys.terms_.resize(N);
  for (std::size_t k = 0; k < N; ++k) {
    const double hfreq = double(rng.below(nyquist));
    const double theta = kTwoPi * rng.uniform();
    const double scale = 1.0 / (1.0 + magnitude);
    // sup |phi + eps e^{i theta} psi| <= 1 + eps, so dividing keeps (I1)
    sys.terms_[k] = {{double(k), scale},
                     {hfreq, magnitude * scale * cplx{std::cos(theta), std::sin(theta)}}};
  }
  sys.finish(dom);
  return sys;
}

CMat FunctionSystem::matrix_at(const SampleSet& xi) const {
  if (xi.dim() != 1) throw DomainError("FunctionSystem::matrix_at: 1-d sample points expected");
  CMat out(xi.size(), size());
  for (std::size_t j = 0; j < size(); ++j) {
    for (std::size_t nu = 0; nu < xi.size(); ++nu) out(nu, j) = evaluate(j, xi.coord(nu));
  }
  return out;
}

CVec FunctionSystem::column_at(const SampleSet& xi, std::size_t j) const {
  CVec v(xi.size());
  for (std::size_t nu = 0; nu < xi.size(); ++nu) v[nu] = evaluate(j, xi.coord(nu));
  return v;
}

nlohmann::json FunctionSystem::descriptor() const {
  nlohmann::json j;
  switch (kind_) {
    case Kind::trig:
      j["kind"] = "trig";
      break;
    case Kind::lacunary:
      j["kind"] = "lacunary";
      j["b"] = lacunary_b_;
      break;
    case Kind::perturbed:
      j["kind"] = "perturbed";
      j["magnitude"] = perturbation_;
      j["seed"] = seed_;
      break;
  }
  j["N"] = size();
  return j;
}

FunctionSystem FunctionSystem::from_descriptor(const nlohmann::json& j, const GridDomain& dom) {
  const std::string kind = j.at("kind").get<std::string>();
  const std::size_t N = j.at("N").get<std::size_t>();
  if (kind == "trig") return trig(N, dom);
  if (kind == "lacunary") return lacunary(N, j.value("b", 2.0), dom);
  if (kind == "perturbed") {
    return perturbed(N, j.value("magnitude", 0.1), j.value("seed", std::uint64_t(0)), dom);
  }
  throw DomainError("FunctionSystem::from_descriptor: unknown kind '" + kind + "'");
}

CVec evaluate_sparse(const SparseElement& e, const FunctionSystem& sys, const GridDomain& dom) {
  const CMat& gm = sys.grid_matrix();
  if (gm.rows() != dom.size()) throw DimensionError("evaluate_sparse: domain/grid mismatch");
  CVec out(dom.size(), 0.0);
  for (std::size_t i = 0; i < e.support.size(); ++i) {
    if (e.support[i] >= sys.size()) throw DimensionError("evaluate_sparse: index out of range");
    kern::axpy(e.coeffs[i], gm.col(e.support[i]), out.data(), out.size());
  }
  return out;
}

CVec evaluate_sparse(const SparseElement& e, const FunctionSystem& sys, const SampleSet& xi) {
  CVec out(xi.size(), 0.0);
  for (std::size_t i = 0; i < e.support.size(); ++i) {
    if (e.support[i] >= sys.size()) throw DimensionError("evaluate_sparse: index out of range");
    for (std::size_t nu = 0; nu < xi.size(); ++nu) {
      out[nu] += e.coeffs[i] * sys.evaluate(e.support[i], xi.coord(nu));
    }
  }
  return out;
}

CVec sample_vector(const CVec& f_grid, const GridDomain& dom, const SampleSet& xi) {
  if (f_grid.size() != dom.size()) throw DimensionError("sample_vector: grid length mismatch");
  if (xi.dim() != dom.dim()) throw DimensionError("sample_vector: dimension mismatch");
  CVec out(xi.size());
  const std::size_t G = dom.size();
  for (std::size_t nu = 0; nu < xi.size(); ++nu) {
    const double x = xi.coord(nu);
    // uniform-grid fast path, then exhaustive match
    std::size_t g = std::size_t(std::llround(x * double(G))) % G;
    bool found = dom.dim() == 1 && std::abs(dom.coord(g) - x) <= 1e-12;
    if (!found) {
      for (g = 0; g < G; ++g) {
        bool same = true;
        for (std::size_t k = 0; k < dom.dim(); ++k) {
          if (std::abs(dom.coord(g, k) - xi.coord(nu, k)) > 1e-12) {
            same = false;
            break;
          }
        }
        if (same) {
          found = true;
          break;
        }
      }
    }
    if (!found) {
      throw DomainError("sample_vector: sample point does not lie on the reference grid");
    }
    out[nu] = f_grid[g];
  }
  return out;
}

CVec sample_vector(const SparseElement& e, const FunctionSystem& sys, const SampleSet& xi) {
  return evaluate_sparse(e, sys, xi);
}

}  // namespace sparec
