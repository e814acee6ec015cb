#include "sparec/domain.hpp"

#include <algorithm>
#include <cmath>

#include "sparec/kernels.hpp"
#include "sparec/random.hpp"

namespace sparec {

namespace {

// scratch for |.|^2 buffers; norms are pure, reuse is per-thread
std::vector<double>& scratch() {
  thread_local std::vector<double> buf;
  return buf;
}

}  // namespace

GridDomain::GridDomain(std::vector<double> points_flat, std::size_t dim,
                       std::vector<double> weights)
    : points_(std::move(points_flat)), weights_(std::move(weights)), dim_(dim) {
  if (dim_ == 0) throw DomainError("GridDomain: dim must be >= 1");
  if (weights_.size() < 2) throw DomainError("GridDomain: need at least 2 grid points");
  if (points_.size() != weights_.size() * dim_) {
    throw DimensionError("GridDomain: points/weights length mismatch");
  }
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0)) throw DomainError("GridDomain: negative quadrature weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw DomainError("GridDomain: quadrature weights must sum to 1");
  }
  // distinctness: points arrive sorted from the factories; general input is
  // checked pairwise after sorting a copy of the flattened keys
  std::vector<std::size_t> order(weights_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    for (std::size_t k = 0; k < dim_; ++k) {
      if (points_[a * dim_ + k] != points_[b * dim_ + k]) {
        return points_[a * dim_ + k] < points_[b * dim_ + k];
      }
    }
    return false;
  });
  for (std::size_t i = 1; i < order.size(); ++i) {
    bool same = true;
    for (std::size_t k = 0; k < dim_; ++k) {
      if (points_[order[i - 1] * dim_ + k] != points_[order[i] * dim_ + k]) {
        same = false;
        break;
      }
    }
    if (same) throw DomainError("GridDomain: grid points must be distinct");
  }
}

GridDomain GridDomain::uniform(std::size_t G, std::size_t dim) {
  if (G < 2) throw DomainError("GridDomain::uniform: need G >= 2");
  if (dim == 0) throw DomainError("GridDomain::uniform: dim must be >= 1");
  std::size_t total = 1;
  for (std::size_t k = 0; k < dim; ++k) total *= G;
  std::vector<double> pts(total * dim);
  for (std::size_t g = 0; g < total; ++g) {
    std::size_t rem = g;
    for (std::size_t k = dim; k-- > 0;) {
      pts[g * dim + k] = double(rem % G) / double(G);
      rem /= G;
    }
  }
  std::vector<double> w(total, 1.0 / double(total));
  return GridDomain(std::move(pts), dim, std::move(w));
}

nlohmann::json GridDomain::to_json() const {
  return {{"grid_size", size()},
          {"dim", dim_},
          {"points", points_},
          {"weights", weights_}};
}

GridDomain GridDomain::from_json(const nlohmann::json& j) {
  return GridDomain(j.at("points").get<std::vector<double>>(), j.at("dim").get<std::size_t>(),
                    j.at("weights").get<std::vector<double>>());
}

SampleSet::SampleSet(std::vector<double> points_flat, std::size_t dim)
    : points_(std::move(points_flat)), dim_(dim) {
  if (dim_ == 0) throw DomainError("SampleSet: dim must be >= 1");
  if (points_.empty() || points_.size() % dim_ != 0) {
    throw DimensionError("SampleSet: need m >= 1 points");
  }
  m_ = points_.size() / dim_;
}

SampleSet::SampleSet(std::vector<double> points_flat, std::size_t dim, std::vector<double> weights)
    : SampleSet(std::move(points_flat), dim) {
  if (weights.size() != m_) throw DimensionError("SampleSet: weights length mismatch");
  for (double w : weights) {
    if (!(w > 0.0)) throw DomainError("SampleSet: weights must be positive");
  }
  weights_ = std::move(weights);
}

SampleSet SampleSet::uniform(std::size_t m) {
  if (m == 0) throw DimensionError("SampleSet::uniform: need m >= 1");
  std::vector<double> pts(m);
  for (std::size_t j = 0; j < m; ++j) pts[j] = double(j) / double(m);
  return SampleSet(std::move(pts), 1);
}

SampleSet SampleSet::random(std::size_t m, std::uint64_t seed) {
  if (m == 0) throw DimensionError("SampleSet::random: need m >= 1");
  Rng rng(seed);
  std::vector<double> pts(m);
  for (auto& x : pts) x = rng.uniform();
  return SampleSet(std::move(pts), 1);
}

SampleSet SampleSet::from_grid_indices(const GridDomain& dom, std::span<const std::size_t> idx) {
  std::vector<double> pts;
  pts.reserve(idx.size() * dom.dim());
  for (std::size_t g : idx) {
    if (g >= dom.size()) throw DimensionError("SampleSet::from_grid_indices: index out of range");
    for (std::size_t k = 0; k < dom.dim(); ++k) pts.push_back(dom.coord(g, k));
  }
  return SampleSet(std::move(pts), dom.dim());
}

nlohmann::json SampleSet::to_json() const {
  nlohmann::json j = {{"m", m_}, {"dim", dim_}, {"points", points_}};
  if (has_weights()) j["weights"] = weights_;
  return j;
}

SampleSet SampleSet::from_json(const nlohmann::json& j) {
  auto pts = j.at("points").get<std::vector<double>>();
  auto dim = j.at("dim").get<std::size_t>();
  if (j.contains("weights")) {
    return SampleSet(std::move(pts), dim, j.at("weights").get<std::vector<double>>());
  }
  return SampleSet(std::move(pts), dim);
}

double weighted_lp(std::span<const cplx> x, std::span<const double> w, Lp p) {
  if (p.is_inf()) return std::sqrt(kern::max_abs2(x.data(), x.size()));
  if (x.size() != w.size()) throw DimensionError("weighted_lp: value/weight length mismatch");
  auto& t = scratch();
  t.resize(x.size());
  kern::abs2(x.data(), t.data(), x.size());
  const double pv = p.value();
  const double s = kern::wsum_powh(t.data(), w.data(), x.size(), pv / 2.0);
  return std::pow(s, 1.0 / pv);
}

double lp_norm_continuous(const FunctionValues& f, const GridDomain& dom, Lp p) {
  if (f.size() != dom.size()) throw DimensionError("lp_norm_continuous: length mismatch");
  if (p.is_inf()) return std::sqrt(kern::max_abs2(f.data(), f.size()));
  return weighted_lp(f, dom.weights(), p);
}

double lp_norm_sample(const FunctionValues& s, Lp p) {
  if (s.empty()) throw DimensionError("lp_norm_sample: empty sample vector");
  if (p.is_inf()) return std::sqrt(kern::max_abs2(s.data(), s.size()));
  auto& t = scratch();
  t.resize(s.size());
  kern::abs2(s.data(), t.data(), s.size());
  const double pv = p.value();
  std::vector<double> w(s.size(), 1.0 / double(s.size()));
  const double sum = kern::wsum_powh(t.data(), w.data(), s.size(), pv / 2.0);
  return std::pow(sum, 1.0 / pv);
}

double weighted_sample_norm(const FunctionValues& s, std::span<const double> w, Lp p) {
  if (p.is_inf()) throw DomainError("weighted_sample_norm: finite p only");
  if (s.size() != w.size()) throw DimensionError("weighted_sample_norm: length mismatch");
  for (double wi : w) {
    if (!(wi > 0.0)) throw DomainError("weighted_sample_norm: weights must be positive");
  }
  return weighted_lp(s, w, p);
}

double mixed_measure_norm(const FunctionValues& f_grid, const FunctionValues& f_samples,
                          const GridDomain& dom, Lp p) {
  if (p.is_inf()) throw DomainError("mixed_measure_norm: finite p only");
  if (f_grid.size() != dom.size()) throw DimensionError("mixed_measure_norm: grid length mismatch");
  if (f_samples.empty()) throw DimensionError("mixed_measure_norm: empty sample vector");
  const double pv = p.value();
  const double a = std::pow(lp_norm_continuous(f_grid, dom, p), pv);
  const double b = std::pow(lp_norm_sample(f_samples, p), pv);
  return std::pow(0.5 * a + 0.5 * b, 1.0 / pv);
}

}  // namespace sparec
