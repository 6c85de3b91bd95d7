#pragma once

// Independent reference computations for tests. Nothing here calls into the
// library's chain or solver code.

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

using Pmf = std::map<int, double>;
using Matrix = std::vector<std::vector<double>>;

// Law of min(cap, X_1 + ... + X_m) by enumerating all |support|^m outcomes.
inline std::vector<double> brute_force_capped_sum(const Pmf& pmf, int m, int cap) {
  std::vector<double> law(cap + 1, 0.0);
  std::vector<std::pair<int, double>> atoms(pmf.begin(), pmf.end());
  std::vector<std::size_t> idx(m, 0);
  while (true) {
    double p = 1.0;
    long sum = 0;
    for (int i = 0; i < m; ++i) {
      p *= atoms[idx[i]].second;
      sum += atoms[idx[i]].first;
    }
    law[std::min<long>(cap, sum)] += p;
    int pos = 0;
    while (pos < m && ++idx[pos] == atoms.size()) idx[pos++] = 0;
    if (pos == m) break;
  }
  return law;
}

// Full transition matrix over {0..n} by brute force, rows 1..n.
inline Matrix brute_force_chain(const Pmf& pmf, int n) {
  Matrix p(n + 1, std::vector<double>(n + 1, 0.0));
  p[0][0] = 1.0;
  for (int m = 1; m <= n; ++m) p[m] = brute_force_capped_sum(pmf, m, n);
  return p;
}

// Gaussian elimination with partial pivoting on a copy.
inline std::vector<double> solve(Matrix a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a[i][k]) > std::abs(a[piv][k])) piv = i;
    if (a[piv][k] == 0.0) throw std::runtime_error("singular");
    std::swap(a[k], a[piv]);
    std::swap(b[k], b[piv]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a[i][k] / a[k][k];
      for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
      b[i] -= f * b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double acc = b[i];
    for (std::size_t j = i + 1; j < n; ++j) acc -= a[i][j] * x[j];
    x[i] = acc / a[i][i];
  }
  return x;
}

// I - M over transient states {1..n}, formed naively.
inline Matrix i_minus_m(const Matrix& p) {
  const std::size_t n = p.size() - 1;
  Matrix a(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i][j] = (i == j ? 1.0 : 0.0) - p[i + 1][j + 1];
  return a;
}

inline std::vector<double> expected_absorption(const Matrix& p) {
  return solve(i_minus_m(p), std::vector<double>(p.size() - 1, 1.0));
}

inline double fundamental_top(const Matrix& p) {
  std::vector<double> e(p.size() - 1, 0.0);
  e.back() = 1.0;
  return solve(i_minus_m(p), e).back();
}

// q_N by first-step analysis on {1..n-1}, formed naively.
inline double never_return(const Matrix& p) {
  const int n = static_cast<int>(p.size()) - 1;
  Matrix a(n - 1, std::vector<double>(n - 1));
  std::vector<double> b(n - 1);
  for (int i = 1; i < n; ++i) {
    b[i - 1] = p[i][0];
    for (int j = 1; j < n; ++j) a[i - 1][j - 1] = (i == j ? 1.0 : 0.0) - p[i][j];
  }
  const auto h = n > 1 ? solve(a, b) : std::vector<double>{};
  double q = p[n][0];
  for (int j = 1; j < n; ++j) q += p[n][j] * h[j - 1];
  return q;
}

// E[V] = q_N * sum_k k P(X_k = N), summed until the terms are negligible.
inline double expected_last_visit_series(const Matrix& p, double q_n, int max_terms) {
  const int n = static_cast<int>(p.size()) - 1;
  std::vector<double> law(n + 1, 0.0), next(n + 1);
  law[n] = 1.0;
  double acc = 0.0;
  for (int k = 1; k <= max_terms; ++k) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j) next[j] += law[i] * p[i][j];
    law.swap(next);
    acc += k * law[n];
  }
  return q_n * acc;
}

inline Pmf binomial2_marginal(double a) {
  return {{0, (1 - a) * (1 - a)}, {1, 2 * a * (1 - a)}, {2, a * a}};
}

}  // namespace oracle
