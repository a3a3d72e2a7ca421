#include "torsion/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace torsion::linalg {

Mat identity(int n) {
  Mat m;
  m.n = n;
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat multiply(const Mat& lhs, const Mat& rhs) {
  Mat out;
  out.n = lhs.n;
  for (int i = 0; i < lhs.n; ++i)
    for (int j = 0; j < lhs.n; ++j) {
      double s = 0;
      for (int k = 0; k < lhs.n; ++k) s += lhs(i, k) * rhs(k, j);
      out(i, j) = s;
    }
  return out;
}

Mat transpose(const Mat& m) {
  Mat out;
  out.n = m.n;
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j) out(i, j) = m(j, i);
  return out;
}

Mat add(const Mat& lhs, const Mat& rhs) {
  Mat out = lhs;
  for (int i = 0; i < lhs.n * lhs.n; ++i)
    out.a[static_cast<std::size_t>(i)] += rhs.a[static_cast<std::size_t>(i)];
  return out;
}

Mat subtract(const Mat& lhs, const Mat& rhs) {
  Mat out = lhs;
  for (int i = 0; i < lhs.n * lhs.n; ++i)
    out.a[static_cast<std::size_t>(i)] -= rhs.a[static_cast<std::size_t>(i)];
  return out;
}

Mat scale(const Mat& m, double factor) {
  Mat out = m;
  for (auto& v : out.a) v *= factor;
  return out;
}

Vec apply(const Mat& m, const Vec& v) {
  Vec out{};
  for (int i = 0; i < m.n; ++i) {
    double s = 0;
    for (int j = 0; j < m.n; ++j) s += m(i, j) * v[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = s;
  }
  return out;
}

namespace {

double inf_norm(const Mat& m) {
  double worst = 0;
  for (int i = 0; i < m.n; ++i) {
    double row = 0;
    for (int j = 0; j < m.n; ++j) row += std::abs(m(i, j));
    worst = std::max(worst, row);
  }
  return worst;
}

}  // namespace

Mat expm(const Mat& m) {
  int squarings = 0;
  double norm = inf_norm(m);
  while (norm > 0.25) {
    norm *= 0.5;
    ++squarings;
  }
  Mat scaled = scale(m, std::ldexp(1.0, -squarings));
  Mat sum = identity(m.n);
  Mat term = identity(m.n);
  for (int k = 1; k <= 24; ++k) {
    term = scale(multiply(term, scaled), 1.0 / k);
    sum = add(sum, term);
    if (inf_norm(term) < 1e-18 * inf_norm(sum)) break;
  }
  for (int s = 0; s < squarings; ++s) sum = multiply(sum, sum);
  return sum;
}

Vec solve(const Mat& m, const Vec& rhs) {
  const int n = m.n;
  double aug[3][4];
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) aug[i][j] = m(i, j);
    aug[i][n] = rhs[static_cast<std::size_t>(i)];
  }
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(aug[r][col]) > std::abs(aug[pivot][col])) pivot = r;
    if (aug[pivot][col] == 0.0)
      throw std::runtime_error("solve: singular matrix");
    if (pivot != col)
      for (int j = 0; j <= n; ++j) std::swap(aug[pivot][j], aug[col][j]);
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = aug[r][col] / aug[col][col];
      for (int j = col; j <= n; ++j) aug[r][j] -= f * aug[col][j];
    }
  }
  Vec x{};
  for (int i = 0; i < n; ++i)
    x[static_cast<std::size_t>(i)] = aug[i][n] / aug[i][i];
  return x;
}

Mat cholesky_psd(const Mat& m) {
  const int n = m.n;
  double scale_ref = 0;
  for (int i = 0; i < n; ++i) scale_ref = std::max(scale_ref, std::abs(m(i, i)));
  const double tol = 1e-13 * scale_ref;
  Mat low;
  low.n = n;
  for (int j = 0; j < n; ++j) {
    double d = m(j, j);
    for (int k = 0; k < j; ++k) d -= low(j, k) * low(j, k);
    if (d < -64.0 * tol)
      throw std::runtime_error("cholesky_psd: matrix not positive semidefinite");
    if (d <= tol) {
      low(j, j) = 0.0;  // semidefinite direction, column stays zero
      continue;
    }
    low(j, j) = std::sqrt(d);
    for (int i = j + 1; i < n; ++i) {
      double s = m(i, j);
      for (int k = 0; k < j; ++k) s -= low(i, k) * low(j, k);
      low(i, j) = s / low(j, j);
    }
  }
  return low;
}

}  // namespace torsion::linalg
