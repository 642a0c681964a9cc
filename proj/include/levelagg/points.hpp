#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace levelagg {

//! Fixed-dimension point set, one contiguous column per coordinate.
class PointMatrix {
public:
  PointMatrix() = default;
  PointMatrix(std::size_t dim, std::size_t n);

  //! Build from row-major values, size must be a multiple of dim.
  static PointMatrix from_rows(std::size_t dim, std::span<const double> row_major);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return n_; }
  bool empty() const { return n_ == 0; }

  double* col(std::size_t c) { return cols_[c].data(); }
  const double* col(std::size_t c) const { return cols_[c].data(); }
  double get(std::size_t i, std::size_t c) const { return cols_[c][i]; }
  void set(std::size_t i, std::size_t c, double v) { cols_[c][i] = v; }

  std::vector<double> row(std::size_t i) const;
  void row_into(std::size_t i, double* out) const;
  std::vector<const double*> col_ptrs() const;

  PointMatrix head(std::size_t count) const;
  PointMatrix tail(std::size_t count) const;

private:
  std::size_t dim_ = 0;
  std::size_t n_ = 0;
  std::vector<std::vector<double>> cols_;
};

//! Axis-aligned box with lower strictly below upper in every coordinate.
struct BoundingBox {
  std::vector<double> lower;
  std::vector<double> upper;

  BoundingBox() = default;
  BoundingBox(std::vector<double> lo, std::vector<double> hi);

  std::size_t dim() const { return lower.size(); }
  bool empty() const { return lower.empty(); }
  double volume() const;
  bool contains(std::span<const double> x) const;

  //! Componentwise sample range expanded by pad_frac of the width per side.
  static BoundingBox around(const PointMatrix& pts, double pad_frac);
};

}  // namespace levelagg
