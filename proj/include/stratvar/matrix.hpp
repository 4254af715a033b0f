#pragma once

#include <cstddef>
#include <vector>

namespace stratvar {

/// Small dense row-major matrix. Sized for design matrices: m rows, a handful
/// of columns.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c)
      : rows(r), cols(c), data(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), 0.0) {}

  double& operator()(int i, int j) {
    return data[static_cast<std::size_t>(i) * cols + j];
  }
  double operator()(int i, int j) const {
    return data[static_cast<std::size_t>(i) * cols + j];
  }

  static Matrix column_of_ones(int r);
};

/// LU factorization with partial pivoting of a small square matrix.
/// Pivots below rel_tol * max|A| raise RankDeficient.
class LuFactors {
 public:
  LuFactors(Matrix a, double rel_tol);

  std::vector<double> solve(std::vector<double> b) const;

 private:
  Matrix lu_;
  std::vector<int> piv_;
};

}  // namespace stratvar
