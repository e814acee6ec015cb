#pragma once

#include <cmath>
#include <limits>

#include "sparec/errors.hpp"

namespace sparec {

/// Norm exponent p in [1, inf]. Infinity is a distinct case, never a large
/// finite stand-in.
class Lp {
 public:
  explicit Lp(double p) : p_(p), inf_(false) {
    if (std::isnan(p) || p < 1.0 || std::isinf(p)) {
      throw DomainError("Lp: exponent must be a finite real >= 1 (use Lp::inf())");
    }
  }

  static Lp inf() {
    Lp r;
    r.inf_ = true;
    r.p_ = std::numeric_limits<double>::infinity();
    return r;
  }

  bool is_inf() const { return inf_; }

  double value() const {
    if (inf_) throw DomainError("Lp: value() called on the sup-norm case");
    return p_;
  }

  bool operator==(const Lp& o) const { return inf_ == o.inf_ && (inf_ || p_ == o.p_); }

 private:
  Lp() = default;
  double p_ = 2.0;
  bool inf_ = false;
};

}  // namespace sparec
