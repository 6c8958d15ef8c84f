#include "rabinrl/linsolve.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace rabinrl {

std::vector<double> solve_dense(std::vector<std::vector<double>> a,
                                std::vector<double> b) {
  const int n = static_cast<int>(b.size());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col]))
        piv = r;
    if (piv != col) {
      std::swap(a[col], a[piv]);
      std::swap(b[col], b[piv]);
    }
    const double d = a[col][col];
    if (d == 0.0)
      throw std::runtime_error("singular linear system");
    for (int r = col + 1; r < n; ++r) {
      const double f = a[r][col] / d;
      if (f == 0.0)
        continue;
      for (int c = col; c < n; ++c)
        a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (int r = n - 1; r >= 0; --r) {
    double acc = b[r];
    for (int c = r + 1; c < n; ++c)
      acc -= a[r][c] * x[c];
    x[r] = acc / a[r][r];
  }
  return x;
}

} // namespace rabinrl
