#include "stratvar/matrix.hpp"

#include <cmath>
#include <utility>

#include "stratvar/errors.hpp"

namespace stratvar {

Matrix Matrix::column_of_ones(int r) {
  Matrix m(r, 1);
  for (int i = 0; i < r; ++i) m(i, 0) = 1.0;
  return m;
}

LuFactors::LuFactors(Matrix a, double rel_tol) : lu_(std::move(a)) {
  if (lu_.rows != lu_.cols) {
    throw DomainError(ErrorCode::SizeMismatch, "LU requires a square matrix");
  }
  const int n = lu_.rows;
  piv_.resize(n);

  double max_abs = 0.0;
  for (double v : lu_.data) max_abs = std::max(max_abs, std::abs(v));
  const double tol = rel_tol * max_abs;

  for (int col = 0; col < n; ++col) {
    int pivot = col;
    double best = std::abs(lu_(col, col));
    for (int r = col + 1; r < n; ++r) {
      const double cand = std::abs(lu_(r, col));
      if (cand > best) {
        best = cand;
        pivot = r;
      }
    }
    if (!(best > tol)) {
      throw DomainError(ErrorCode::RankDeficient,
                        "pivot below relative tolerance during factorization");
    }
    piv_[col] = pivot;
    if (pivot != col) {
      for (int c = 0; c < n; ++c) std::swap(lu_(col, c), lu_(pivot, c));
    }
    const double d = lu_(col, col);
    for (int r = col + 1; r < n; ++r) {
      const double f = lu_(r, col) / d;
      lu_(r, col) = f;
      for (int c = col + 1; c < n; ++c) lu_(r, c) -= f * lu_(col, c);
    }
  }
}

std::vector<double> LuFactors::solve(std::vector<double> b) const {
  const int n = lu_.rows;
  if (static_cast<int>(b.size()) != n) {
    throw DomainError(ErrorCode::SizeMismatch, "rhs length does not match factorization");
  }
  for (int col = 0; col < n; ++col) {
    if (piv_[col] != col) std::swap(b[col], b[piv_[col]]);
    for (int r = col + 1; r < n; ++r) b[r] -= lu_(r, col) * b[col];
  }
  for (int r = n - 1; r >= 0; --r) {
    double acc = b[r];
    for (int c = r + 1; c < n; ++c) acc -= lu_(r, c) * b[c];
    b[r] = acc / lu_(r, r);
  }
  return b;
}

}  // namespace stratvar
