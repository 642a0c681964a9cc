#include "levelagg/points.hpp"

#include <algorithm>
#include <stdexcept>

namespace levelagg {

PointMatrix::PointMatrix(std::size_t dim, std::size_t n)
    : dim_(dim), n_(n), cols_(dim, std::vector<double>(n)) {
  if (dim == 0) throw std::invalid_argument("PointMatrix: dimension must be positive");
}

PointMatrix PointMatrix::from_rows(std::size_t dim, std::span<const double> row_major) {
  if (dim == 0) throw std::invalid_argument("PointMatrix: dimension must be positive");
  if (row_major.size() % dim != 0)
    throw std::invalid_argument("PointMatrix: value count is not a multiple of the dimension");
  const std::size_t n = row_major.size() / dim;
  PointMatrix out(dim, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < dim; ++c) out.cols_[c][i] = row_major[i * dim + c];
  return out;
}

std::vector<double> PointMatrix::row(std::size_t i) const {
  std::vector<double> out(dim_);
  row_into(i, out.data());
  return out;
}

void PointMatrix::row_into(std::size_t i, double* out) const {
  for (std::size_t c = 0; c < dim_; ++c) out[c] = cols_[c][i];
}

std::vector<const double*> PointMatrix::col_ptrs() const {
  std::vector<const double*> ptrs(dim_);
  for (std::size_t c = 0; c < dim_; ++c) ptrs[c] = cols_[c].data();
  return ptrs;
}

PointMatrix PointMatrix::head(std::size_t count) const {
  if (count > n_) throw std::out_of_range("PointMatrix::head");
  PointMatrix out(dim_, count);
  for (std::size_t c = 0; c < dim_; ++c)
    std::copy_n(cols_[c].begin(), count, out.cols_[c].begin());
  return out;
}

PointMatrix PointMatrix::tail(std::size_t count) const {
  if (count > n_) throw std::out_of_range("PointMatrix::tail");
  PointMatrix out(dim_, count);
  for (std::size_t c = 0; c < dim_; ++c)
    std::copy_n(cols_[c].begin() + static_cast<std::ptrdiff_t>(n_ - count), count,
                out.cols_[c].begin());
  return out;
}

BoundingBox::BoundingBox(std::vector<double> lo, std::vector<double> hi)
    : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() != upper.size() || lower.empty())
    throw std::invalid_argument("BoundingBox: bound vectors must match and be non-empty");
  for (std::size_t c = 0; c < lower.size(); ++c)
    if (!(lower[c] < upper[c]))
      throw std::invalid_argument("BoundingBox: lower bound must be below upper bound");
}

double BoundingBox::volume() const {
  double v = 1.0;
  for (std::size_t c = 0; c < lower.size(); ++c) v *= upper[c] - lower[c];
  return v;
}

bool BoundingBox::contains(std::span<const double> x) const {
  if (x.size() != lower.size()) return false;
  for (std::size_t c = 0; c < lower.size(); ++c)
    if (x[c] < lower[c] || x[c] > upper[c]) return false;
  return true;
}

BoundingBox BoundingBox::around(const PointMatrix& pts, double pad_frac) {
  if (pts.empty()) throw std::invalid_argument("BoundingBox::around: empty point set");
  std::vector<double> lo(pts.dim()), hi(pts.dim());
  for (std::size_t c = 0; c < pts.dim(); ++c) {
    const double* col = pts.col(c);
    double mn = col[0], mx = col[0];
    for (std::size_t i = 1; i < pts.size(); ++i) {
      mn = std::min(mn, col[i]);
      mx = std::max(mx, col[i]);
    }
    double pad = (mx - mn) * pad_frac;
    if (pad <= 0.0) pad = 0.5;  // degenerate spread still needs a usable box
    lo[c] = mn - pad;
    hi[c] = mx + pad;
  }
  return BoundingBox(std::move(lo), std::move(hi));
}

}  // namespace levelagg
