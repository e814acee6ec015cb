#pragma once

#include <cstdint>
#include <vector>

#include "sparec/cmat.hpp"
#include "sparec/domain.hpp"

namespace sparec {

/// A member of Sigma_v: coefficients on a small support set.
struct SparseElement {
  std::vector<std::size_t> support;
  CVec coeffs;

  SparseElement() = default;
  SparseElement(std::vector<std::size_t> idx, CVec c);
};

/// Finite dictionary of uniformly bounded functions on the torus. Each column
/// is a short sum of complex exponentials, so it can be evaluated analytically
/// at arbitrary sample points; values on the reference grid are cached densely
/// for the solvers.
class FunctionSystem {
 public:
  enum class Kind { trig, lacunary, perturbed };

  static FunctionSystem trig(std::size_t N, const GridDomain& dom);
  static FunctionSystem lacunary(std::size_t n, double b, const GridDomain& dom);
  static FunctionSystem perturbed(std::size_t N, double magnitude, std::uint64_t seed,
                                  const GridDomain& dom);

  std::size_t size() const { return terms_.size(); }
  Kind kind() const { return kind_; }
  cplx evaluate(std::size_t j, double x) const;
  const CMat& grid_matrix() const { return grid_matrix_; }
  CMat matrix_at(const SampleSet& xi) const;
  CVec column_at(const SampleSet& xi, std::size_t j) const;
  double uniform_bound() const { return uniform_bound_; }

  nlohmann::json descriptor() const;
  static FunctionSystem from_descriptor(const nlohmann::json& j, const GridDomain& dom);

 private:
  struct Term {
    double freq;
    cplx amp;
  };

  FunctionSystem() = default;
  void finish(const GridDomain& dom);

  std::vector<std::vector<Term>> terms_;
  CMat grid_matrix_;
  double uniform_bound_ = 0.0;
  Kind kind_ = Kind::trig;
  double lacunary_b_ = 0.0;
  double perturbation_ = 0.0;
  std::uint64_t seed_ = 0;
};

/// Pointwise sum over the support on the reference grid.
CVec evaluate_sparse(const SparseElement& e, const FunctionSystem& sys, const GridDomain& dom);
/// Pointwise sum over the support at the sample points.
CVec evaluate_sparse(const SparseElement& e, const FunctionSystem& sys, const SampleSet& xi);

/// S(f, xi) for grid values; sample points must coincide with grid nodes.
CVec sample_vector(const CVec& f_grid, const GridDomain& dom, const SampleSet& xi);
/// S(f, xi) for a sparse element (analytic evaluation, points may be off-grid).
CVec sample_vector(const SparseElement& e, const FunctionSystem& sys, const SampleSet& xi);

}  // namespace sparec
