#include <uipdg/basis.hpp>

#include <cmath>

namespace uipdg {

double jacobi_eval(int n, int alpha, int beta, double x) {
  if (n == 0)
    return 1.0;
  const double a = alpha, b = beta;
  double pm1 = 1.0;
  double p = 0.5 * (a - b) + 0.5 * (a + b + 2.0) * x;
  for (int m = 2; m <= n; ++m) {
    const double c = 2.0 * m + a + b;
    const double a1 = 2.0 * m * (m + a + b) * (c - 2.0);
    const double a2 = (c - 1.0) * (a * a - b * b);
    const double a3 = (c - 1.0) * c * (c - 2.0);
    const double a4 = 2.0 * (m + a - 1.0) * (m + b - 1.0) * c;
    const double pnext = ((a2 + a3 * x) * p - a4 * pm1) / a1;
    pm1 = p;
    p = pnext;
  }
  return p;
}

namespace {

// d/dx P_n^(a,b) = (n + a + b + 1)/2 * P_{n-1}^(a+1,b+1)
double jacobi_deriv(int n, int alpha, int beta, double x) {
  if (n == 0)
    return 0.0;
  return 0.5 * (n + alpha + beta + 1.0) * jacobi_eval(n - 1, alpha + 1, beta + 1, x);
}

// Collapsed coordinates: eta1 = 2x/(1-y) - 1, eta2 = 2y - 1.  At the
// collapsed vertex y = 1 every basis value and gradient has a finite limit
// independent of eta1, so eta1 is clamped there.
inline void collapse(double x, double y, double& eta1, double& eta2, double& h) {
  h = 1.0 - y;
  eta2 = 2.0 * y - 1.0;
  eta1 = (h > 1e-12) ? 2.0 * x / h - 1.0 : -1.0;
}

inline double norm_factor(int i, int j) {
  return std::sqrt(2.0 * (2.0 * i + 1.0) * (i + j + 1.0));
}

} // namespace

void dubiner_eval(int k, double x, double y, double* values) {
  double eta1, eta2, h;
  collapse(x, y, eta1, eta2, h);
  int idx = 0;
  for (int d = 0; d <= k; ++d) {
    for (int j = 0; j <= d; ++j) {
      const int i = d - j;
      double hi = 1.0;
      for (int p = 0; p < i; ++p)
        hi *= h;
      values[idx++] = norm_factor(i, j) * jacobi_eval(i, 0, 0, eta1) * hi *
                      jacobi_eval(j, 2 * i + 1, 0, eta2);
    }
  }
}

void dubiner_grad(int k, double x, double y, double* gx, double* gy) {
  double eta1, eta2, h;
  collapse(x, y, eta1, eta2, h);
  int idx = 0;
  for (int d = 0; d <= k; ++d) {
    for (int j = 0; j <= d; ++j) {
      const int i = d - j;
      const double nf = norm_factor(i, j);
      const double pi = jacobi_eval(i, 0, 0, eta1);
      const double dpi = jacobi_deriv(i, 0, 0, eta1);
      const double pj = jacobi_eval(j, 2 * i + 1, 0, eta2);
      const double dpj = jacobi_deriv(j, 2 * i + 1, 0, eta2);
      // h^(i-1) appears in both derivatives; for i = 0 those terms vanish.
      double him1 = 1.0;
      for (int p = 0; p + 1 < i; ++p)
        him1 *= h;
      const double hi = (i == 0) ? 1.0 : him1 * h;
      if (i == 0) {
        gx[idx] = 0.0;
        gy[idx] = nf * 2.0 * dpj;
      } else {
        gx[idx] = nf * 2.0 * dpi * him1 * pj;
        gy[idx] = nf * (dpi * (1.0 + eta1) * him1 * pj - i * pi * him1 * pj +
                        2.0 * pi * hi * dpj);
      }
      ++idx;
    }
  }
}

void edge_basis_eval(int k, double t, double* values) {
  const double s = 2.0 * t - 1.0;
  for (int m = 0; m <= k; ++m)
    values[m] = std::sqrt(2.0 * m + 1.0) * jacobi_eval(m, 0, 0, s);
}

} // namespace uipdg
