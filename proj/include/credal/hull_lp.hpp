#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "credal/opinion_space.hpp"
#include "credal/rational.hpp"

namespace credal {

/// Linear functional y with threshold t: y . v_w <= t for every row, y . c > t.
template <typename T>
struct Separation {
  std::vector<T> y;
  T threshold{};
};

template <typename T>
struct HullResult {
  bool member = false;
  std::vector<T> lambda;  // one weight per row, when member
  std::optional<Separation<T>> separation;
  std::size_t pivots = 0;
};

namespace detail {

inline bool is_zero(double v, double eps) { return std::abs(v) <= eps; }
inline bool is_zero(const Rational& v, double) { return sgn(v) == 0; }
inline bool is_positive(double v, double eps) { return v > eps; }
inline bool is_positive(const Rational& v, double) { return sgn(v) > 0; }
inline bool is_negative(double v, double eps) { return v < -eps; }
inline bool is_negative(const Rational& v, double) { return sgn(v) < 0; }

}  // namespace detail

/// Decides c in conv(rows) by a phase-1 simplex with Bland's rule.
///
/// Constraints: sum_w lambda_w v_w(p_i) = c_i and sum_w lambda_w = 1,
/// lambda >= 0. Rows are sign-normalized so the right-hand side is
/// nonnegative and one artificial per row starts the basis. When the
/// artificial objective stays positive the phase-1 duals u give the
/// separating functional: u . (v_w, 1) <= 0 for all w and u . (c, 1) > 0.
template <typename T>
HullResult<T> hull_membership(const ValuationMatrix& matrix, const std::vector<T>& c, double eps = 1e-9) {
  using detail::is_negative;
  using detail::is_positive;
  using detail::is_zero;

  const std::size_t m = matrix.cols + 1;  // constraint rows
  const std::size_t n = matrix.row_count();
  const std::size_t cols = n + m;  // structural then artificial
  std::vector<std::vector<T>> tab(m, std::vector<T>(cols + 1, T(0)));
  std::vector<int> sign(m, 1);

  for (std::size_t i = 0; i < m; ++i) {
    const T rhs = i < matrix.cols ? c[i] : T(1);
    sign[i] = is_negative(rhs, 0.0) ? -1 : 1;
    for (std::size_t j = 0; j < n; ++j) {
      const T a = i < matrix.cols ? T(matrix.at(j, i)) : T(1);
      tab[i][j] = sign[i] < 0 ? T(-a) : a;
    }
    tab[i][n + i] = T(1);
    tab[i][cols] = sign[i] < 0 ? T(-rhs) : rhs;
  }

  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;

  // reduced costs d_j = cost_j - sum_i cost_{B_i} tab[i][j]; cost 1 on artificials
  std::vector<T> red(cols + 1, T(0));
  auto recompute = [&] {
    for (std::size_t j = 0; j <= cols; ++j) {
      T s = (j >= n && j < cols) ? T(1) : T(0);
      for (std::size_t i = 0; i < m; ++i) {
        if (basis[i] >= n) s -= tab[i][j];
      }
      red[j] = s;
    }
  };
  recompute();

  HullResult<T> result;
  const std::size_t cap = 50 * (cols + m) + 1000;
  while (result.pivots < cap) {
    std::size_t enter = cols;
    for (std::size_t j = 0; j < cols; ++j) {
      if (is_negative(red[j], eps)) {
        enter = j;
        break;
      }
    }
    if (enter == cols) break;
    std::size_t leave = m;
    T best{};
    for (std::size_t i = 0; i < m; ++i) {
      if (!is_positive(tab[i][enter], eps)) continue;
      T ratio = tab[i][cols] / tab[i][enter];
      if (leave == m || ratio < best || (!(best < ratio) && basis[i] < basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave == m) break;  // unbounded cannot happen for phase 1
    const T piv = tab[leave][enter];
    for (auto& v : tab[leave]) v /= piv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == leave || is_zero(tab[i][enter], 0.0)) continue;
      const T f = tab[i][enter];
      for (std::size_t j = 0; j <= cols; ++j) tab[i][j] -= f * tab[leave][j];
    }
    basis[leave] = enter;
    ++result.pivots;
    recompute();
  }

  // objective = sum of basic artificial values = -red[cols]
  const T objective = -red[cols];
  if (!is_positive(objective, eps)) {
    result.member = true;
    result.lambda.assign(n, T(0));
    for (std::size_t i = 0; i < m; ++i) {
      if (basis[i] < n) result.lambda[basis[i]] = tab[i][cols];
    }
    for (auto& l : result.lambda) {
      if (is_negative(l, 0.0)) l = T(0);
    }
    return result;
  }

  // duals of the sign-normalized rows: u'_i = 1 - red(artificial i)
  Separation<T> sep;
  sep.y.assign(matrix.cols, T(0));
  T u_last{};
  for (std::size_t i = 0; i < m; ++i) {
    T u = T(1) - red[n + i];
    if (sign[i] < 0) u = -u;
    if (i < matrix.cols) {
      sep.y[i] = u;
    } else {
      u_last = u;
    }
  }
  sep.threshold = -u_last;
  result.separation = std::move(sep);
  return result;
}

}  // namespace credal
