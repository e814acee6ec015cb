#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "sparec/errors.hpp"

namespace sparec {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

/// Column-major complex matrix. Columns are the unit the kernels consume
/// (basis functions tabulated on a point set).
class CMat {
 public:
  CMat() = default;
  CMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  cplx& operator()(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }

  cplx* col(std::size_t j) { return data_.data() + j * rows_; }
  const cplx* col(std::size_t j) const { return data_.data() + j * rows_; }
  std::span<const cplx> col_span(std::size_t j) const { return {col(j), rows_}; }

  CMat select_cols(std::span<const std::size_t> idx) const {
    CMat out(rows_, idx.size());
    for (std::size_t j = 0; j < idx.size(); ++j) {
      if (idx[j] >= cols_) throw DimensionError("CMat::select_cols: column index out of range");
      std::copy(col(idx[j]), col(idx[j]) + rows_, out.col(j));
    }
    return out;
  }

  /// Rows of `other` appended below this matrix (same column count).
  CMat vstack(const CMat& other) const {
    if (other.cols_ != cols_) throw DimensionError("CMat::vstack: column count mismatch");
    CMat out(rows_ + other.rows_, cols_);
    for (std::size_t j = 0; j < cols_; ++j) {
      std::copy(col(j), col(j) + rows_, out.col(j));
      std::copy(other.col(j), other.col(j) + other.rows_, out.col(j) + rows_);
    }
    return out;
  }

  const CVec& data() const { return data_; }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  CVec data_;
};

}  // namespace sparec
