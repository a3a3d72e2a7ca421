#pragma once

#include <array>
#include <cstddef>

namespace torsion::linalg {

// Dense matrix of dimension n <= 3, enough for the simulator state spaces.
struct Mat {
  int n = 0;
  std::array<double, 9> a{};

  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i * n + j)]; }
  double operator()(int i, int j) const {
    return a[static_cast<std::size_t>(i * n + j)];
  }
};

using Vec = std::array<double, 3>;

Mat identity(int n);
Mat multiply(const Mat& lhs, const Mat& rhs);
Mat transpose(const Mat& m);
Mat add(const Mat& lhs, const Mat& rhs);
Mat subtract(const Mat& lhs, const Mat& rhs);
Mat scale(const Mat& m, double factor);
Vec apply(const Mat& m, const Vec& v);

// Matrix exponential by scaling-and-squaring with a Taylor series.
Mat expm(const Mat& m);

// Solves m x = rhs by Gaussian elimination with partial pivoting.
Vec solve(const Mat& m, const Vec& rhs);

// Lower-triangular Cholesky factor of a symmetric positive semidefinite
// matrix; pivots within rounding of zero are treated as exactly zero.
Mat cholesky_psd(const Mat& m);

}  // namespace torsion::linalg
