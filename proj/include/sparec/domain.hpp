#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sparec/cmat.hpp"
#include "sparec/lp.hpp"

#include "json.hpp"

namespace sparec {

/// Per-point function values. Whether the vector lives on the reference grid
/// or on a sample set is determined by the call site.
using FunctionValues = CVec;

/// The domain: a finite reference grid on the torus [0,1)^d carrying a
/// probability measure (quadrature weights). All "continuous" norms are
/// quadrature norms against this measure.
class GridDomain {
 public:
  GridDomain(std::vector<double> points_flat, std::size_t dim, std::vector<double> weights);

  /// Uniform grid of G points per axis with weights 1/G^d.
  static GridDomain uniform(std::size_t G, std::size_t dim = 1);

  std::size_t size() const { return weights_.size(); }
  std::size_t dim() const { return dim_; }
  double coord(std::size_t g, std::size_t axis = 0) const { return points_[g * dim_ + axis]; }
  std::span<const double> weights() const { return weights_; }
  std::span<const double> points_flat() const { return points_; }

  nlohmann::json to_json() const;
  static GridDomain from_json(const nlohmann::json& j);

 private:
  std::vector<double> points_;
  std::vector<double> weights_;
  std::size_t dim_ = 1;
};

/// A set of m sample points with the normalized counting measure, plus
/// optional explicit positive weights for the weighted sample norms.
class SampleSet {
 public:
  SampleSet(std::vector<double> points_flat, std::size_t dim);
  SampleSet(std::vector<double> points_flat, std::size_t dim, std::vector<double> weights);

  /// Points j/m, j = 0..m-1 (d = 1).
  static SampleSet uniform(std::size_t m);
  /// m i.i.d. uniform points on [0,1) (d = 1).
  static SampleSet random(std::size_t m, std::uint64_t seed);
  /// Grid points at the given indices.
  static SampleSet from_grid_indices(const GridDomain& dom, std::span<const std::size_t> idx);

  std::size_t size() const { return m_; }
  std::size_t dim() const { return dim_; }
  double coord(std::size_t nu, std::size_t axis = 0) const { return points_[nu * dim_ + axis]; }
  std::span<const double> points_flat() const { return points_; }

  bool has_weights() const { return !weights_.empty(); }
  std::span<const double> weights() const { return weights_; }
  /// Normalized counting weights 1/m.
  std::vector<double> counting_weights() const { return std::vector<double>(m_, 1.0 / double(m_)); }

  nlohmann::json to_json() const;
  static SampleSet from_json(const nlohmann::json& j);

 private:
  std::vector<double> points_;
  std::vector<double> weights_;
  std::size_t dim_ = 1;
  std::size_t m_ = 0;
};

/// (sum_i w_i |x_i|^p)^(1/p); max_i |x_i| when p is the sup norm.
double weighted_lp(std::span<const cplx> x, std::span<const double> w, Lp p);

/// L_p(Omega, mu) quadrature norm of grid values.
double lp_norm_continuous(const FunctionValues& f, const GridDomain& dom, Lp p);

/// Normalized counting norm (1/m sum |s_nu|^p)^(1/p) of a sample vector.
double lp_norm_sample(const FunctionValues& s, Lp p);

/// (sum w_nu |s_nu|^p)^(1/p) for an explicit positive weight; finite p only.
double weighted_sample_norm(const FunctionValues& s, std::span<const double> w, Lp p);

/// Norm in the mixed measure (mu + mu_m)/2; finite p only.
double mixed_measure_norm(const FunctionValues& f_grid, const FunctionValues& f_samples,
                          const GridDomain& dom, Lp p);

}  // namespace sparec
