#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "fhtlr/errors.hpp"
#include "fhtlr/indexing.hpp"
#include "fhtlr/rng.hpp"

namespace fhtlr {

// Minimal dense row-major matrix; all the factor algebra below is
// element-wise, so nothing heavier is needed.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c, double fill = 0.0)
      : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, fill) {
    if (r < 0 || c < 0) throw ShapeError("negative matrix extent");
  }

  double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
  double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  const double* row(int r) const { return data.data() + static_cast<std::size_t>(r) * cols; }
  double* row(int r) { return data.data() + static_cast<std::size_t>(r) * cols; }
};

// Dense tensor, row-major with the first dimension slowest (same mixed-radix
// order as flatten()).
struct DenseTensor {
  std::vector<int> dims;
  std::vector<double> data;

  DenseTensor() = default;
  explicit DenseTensor(std::vector<int> d)
      : dims(std::move(d)), data(joint_cardinality(dims), 0.0) {}

  double at(const MultiIndex& idx) const { return data[flatten(dims, idx)]; }
  double& at(const MultiIndex& idx) { return data[flatten(dims, idx)]; }
};

// Rank-K PARAFAC (CP) model: one factor matrix per tensor dimension, factor d
// of shape dims[d] x K. An entry of the represented tensor is the sum over k
// of the product of one row entry per factor.
class ParafacModel {
 public:
  ParafacModel(std::vector<int> dims, int rank) : dims_(std::move(dims)), rank_(rank) {
    if (dims_.empty()) throw ShapeError("tensor needs at least one dimension");
    if (rank_ < 0) throw ShapeError("rank must be >= 0");
    joint_cardinality(dims_);  // validates cardinalities
    factors_.reserve(dims_.size());
    for (int extent : dims_) factors_.emplace_back(extent, rank_);
  }

  // I.i.d. Gaussian entries, mean 0, sd = scale. Small random values break
  // the rank symmetry of the all-zero model.
  static ParafacModel random(std::vector<int> dims, int rank, double scale,
                             std::uint64_t seed) {
    ParafacModel m(std::move(dims), rank);
    Rng rng(seed);
    for (Matrix& f : m.factors_) {
      for (double& v : f.data) v = scale * next_gaussian(rng);
    }
    return m;
  }

  const std::vector<int>& dims() const { return dims_; }
  int rank() const { return rank_; }
  int order() const { return static_cast<int>(dims_.size()); }

  const Matrix& factor(int d) const { return factors_[check_mode(d)]; }
  Matrix& factor(int d) { return factors_[check_mode(d)]; }

  // Entry at a full multi-index; O(order * rank).
  double eval_entry(const MultiIndex& idx) const {
    if (idx.size() != dims_.size()) {
      throw IndexError("index order " + std::to_string(idx.size()) +
                       " does not match tensor order " + std::to_string(dims_.size()));
    }
    for (std::size_t d = 0; d < dims_.size(); ++d) {
      if (idx[d] < 0 || idx[d] >= dims_[d]) {
        throw IndexError("coordinate " + std::to_string(idx[d]) +
                         " out of range for dimension " + std::to_string(d));
      }
    }
    double sum = 0.0;
    for (int k = 0; k < rank_; ++k) {
      double prod = 1.0;
      for (std::size_t d = 0; d < dims_.size(); ++d) {
        prod *= factors_[d].at(idx[d], k);
      }
      sum += prod;
    }
    return sum;
  }

  // Stored reals: sum over dimensions of extent * rank.
  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const Matrix& f : factors_) n += f.data.size();
    return n;
  }

  bool all_finite() const {
    for (const Matrix& f : factors_) {
      for (double v : f.data) {
        if (!std::isfinite(v)) return false;
      }
    }
    return true;
  }

 private:
  int check_mode(int d) const {
    if (d < 0 || static_cast<std::size_t>(d) >= factors_.size()) {
      throw IndexError("mode " + std::to_string(d) + " out of range");
    }
    return d;
  }

  std::vector<int> dims_;
  int rank_;
  std::vector<Matrix> factors_;
};

inline std::size_t count_params(const ParafacModel& model) { return model.parameter_count(); }

// Khatri-Rao product of an ordered list of matrices sharing a column count:
// column k of the result is the Kronecker product of the k-th columns in the
// given order, so the first-listed matrix varies slowest in the row index.
inline Matrix khatri_rao(const std::vector<const Matrix*>& ms) {
  if (ms.empty()) throw ShapeError("khatri_rao needs at least one matrix");
  const int cols = ms[0]->cols;
  std::size_t rows = 1;
  for (const Matrix* m : ms) {
    if (m->cols != cols) {
      throw ShapeError("khatri_rao column counts differ: " + std::to_string(m->cols) +
                       " vs " + std::to_string(cols));
    }
    rows *= static_cast<std::size_t>(m->rows);
  }
  Matrix out(static_cast<int>(rows), cols);
  std::vector<int> radix(ms.size());
  for (std::size_t r = 0; r < rows; ++r) {
    // mixed-radix expansion of r over the input row counts, first slowest
    std::size_t rem = r;
    for (std::size_t j = ms.size(); j-- > 0;) {
      radix[j] = static_cast<int>(rem % ms[j]->rows);
      rem /= ms[j]->rows;
    }
    for (int k = 0; k < cols; ++k) {
      double prod = 1.0;
      for (std::size_t j = 0; j < ms.size(); ++j) prod *= ms[j]->at(radix[j], k);
      out.at(static_cast<int>(r), k) = prod;
    }
  }
  return out;
}

inline Matrix khatri_rao(const std::vector<Matrix>& ms) {
  std::vector<const Matrix*> ptrs;
  ptrs.reserve(ms.size());
  for (const Matrix& m : ms) ptrs.push_back(&m);
  return khatri_rao(ptrs);
}

/*
 * Mode-d matricization: (KR of all factors except d, ascending) * factor_d^T,
 * of shape (prod of the other extents) x dims[d].
 *
 * Index convention (fixed so that matricize/unmatricize are mutual inverses
 * and agree with eval_entry): entry (row, col) is the tensor entry whose d-th
 * coordinate is col and whose remaining coordinates are the mixed-radix
 * expansion of row over the other dimensions taken in ascending order, with
 * the first-listed (lowest-index) dimension varying slowest.
 */
inline Matrix matricize(const ParafacModel& model, int d) {
  if (d < 0 || d >= model.order()) throw IndexError("mode " + std::to_string(d) + " out of range");
  std::vector<const Matrix*> others;
  others.reserve(model.order() - 1);
  for (int j = 0; j < model.order(); ++j) {
    if (j != d) others.push_back(&model.factor(j));
  }
  Matrix kr = others.empty() ? Matrix(1, model.rank(), 1.0) : khatri_rao(others);
  const Matrix& fd = model.factor(d);
  Matrix out(kr.rows, fd.rows);
  for (int r = 0; r < kr.rows; ++r) {
    for (int c = 0; c < fd.rows; ++c) {
      double sum = 0.0;
      for (int k = 0; k < model.rank(); ++k) sum += kr.at(r, k) * fd.at(c, k);
      out.at(r, c) = sum;
    }
  }
  return out;
}

// Inverse of matricize under the convention above: rebuilds the dense tensor
// of the given dims from a mode-d unfolding.
inline DenseTensor unmatricize(const Matrix& mat, int d, const std::vector<int>& dims) {
  if (d < 0 || static_cast<std::size_t>(d) >= dims.size()) {
    throw IndexError("mode " + std::to_string(d) + " out of range");
  }
  std::vector<int> other_dims;
  other_dims.reserve(dims.size() - 1);
  for (std::size_t j = 0; j < dims.size(); ++j) {
    if (static_cast<int>(j) != d) other_dims.push_back(dims[j]);
  }
  const std::size_t other_count =
      other_dims.empty() ? 1 : joint_cardinality(other_dims);
  if (mat.rows != static_cast<int>(other_count) || mat.cols != dims[d]) {
    throw ShapeError("unfolding shape does not match dims for mode " + std::to_string(d));
  }
  DenseTensor out(dims);
  MultiIndex idx(dims.size());
  for (std::size_t r = 0; r < other_count; ++r) {
    const MultiIndex rest = other_dims.empty() ? MultiIndex{} : unflatten(other_dims, r);
    std::size_t j = 0;
    for (std::size_t dim = 0; dim < dims.size(); ++dim) {
      if (static_cast<int>(dim) != d) idx[dim] = rest[j++];
    }
    for (int c = 0; c < dims[d]; ++c) {
      idx[d] = c;
      out.at(idx) = mat.at(static_cast<int>(r), c);
    }
  }
  return out;
}

// Dense reconstruction of the whole tensor. Guarded by a size limit: greedy
// maximization should use eval_entry over action fibers, not this.
inline DenseTensor reconstruct(const ParafacModel& model,
                               std::size_t dense_limit = 10'000'000) {
  const std::size_t total = joint_cardinality(model.dims());
  if (total > dense_limit) {
    throw CapacityError("dense reconstruction of " + std::to_string(total) +
                        " entries exceeds the limit of " + std::to_string(dense_limit));
  }
  DenseTensor out(model.dims());
  for (std::size_t flat = 0; flat < total; ++flat) {
    out.data[flat] = model.eval_entry(unflatten(model.dims(), flat));
  }
  return out;
}

}  // namespace fhtlr
