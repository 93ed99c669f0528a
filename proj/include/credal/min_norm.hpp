#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "credal/rational.hpp"

namespace credal {

/// Minimum-norm point of conv(points) under <x, y> = sum_i h_i x_i y_i,
/// by Wolfe's algorithm. Exact for T = Rational; for double the optimality
/// and positivity tests use `eps`.
template <typename T>
struct MinNormResult {
  std::vector<T> point;
  std::vector<T> lambda;  // weight of each input point
  std::size_t major_iterations = 0;
  bool converged = false;
};

namespace detail {

template <typename T>
T inner(const std::vector<T>& x, const std::vector<T>& y, const std::vector<T>& h) {
  T s(0);
  for (std::size_t i = 0; i < x.size(); ++i) s += h[i] * x[i] * y[i];
  return s;
}

/// Solves A z = b by Gaussian elimination with partial pivoting (first
/// nonzero pivot for rationals). nullopt if singular.
template <typename T>
std::optional<std::vector<T>> solve_dense(std::vector<std::vector<T>> a, std::vector<T> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = n;
    if constexpr (std::is_same_v<T, double>) {
      double best = 1e-14;
      for (std::size_t r = col; r < n; ++r) {
        if (std::abs(a[r][col]) > best) {
          best = std::abs(a[r][col]);
          piv = r;
        }
      }
    } else {
      for (std::size_t r = col; r < n; ++r) {
        if (sgn(a[r][col]) != 0) {
          piv = r;
          break;
        }
      }
    }
    if (piv == n) return std::nullopt;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const T f = a[r][col] / a[col][col];
      if (f == T(0)) continue;
      for (std::size_t k = col; k < n; ++k) a[r][k] -= f * a[col][k];
      b[r] -= f * b[col];
    }
  }
  std::vector<T> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = b[i] / a[i][i];
  return z;
}

}  // namespace detail

template <typename T>
MinNormResult<T> min_norm_point(const std::vector<std::vector<T>>& points, const std::vector<T>& h,
                                double eps = 1e-12, std::size_t max_iterations = 100000) {
  using detail::inner;
  const std::size_t n = points.size();
  const std::size_t dim = h.size();
  MinNormResult<T> out;
  out.lambda.assign(n, T(0));
  if (n == 0) return out;

  auto is_pos = [&](const T& v) {
    if constexpr (std::is_same_v<T, double>) {
      return v > eps;
    } else {
      return sgn(v) > 0;
    }
  };

  double scale = 1.0;
  std::size_t start = 0;
  {
    T best = inner(points[0], points[0], h);
    for (std::size_t j = 1; j < n; ++j) {
      T v = inner(points[j], points[j], h);
      if (v < best) {
        best = v;
        start = j;
      }
    }
    if constexpr (std::is_same_v<T, double>) {
      for (const auto& p : points) scale = std::max(scale, inner(p, p, h));
    }
  }

  std::vector<std::size_t> active{start};
  std::vector<T> weight{T(1)};
  std::vector<T> x = points[start];

  auto combine = [&](const std::vector<T>& w) {
    std::vector<T> y(dim, T(0));
    for (std::size_t k = 0; k < active.size(); ++k) {
      for (std::size_t i = 0; i < dim; ++i) y[i] += w[k] * points[active[k]][i];
    }
    return y;
  };

  while (out.major_iterations < max_iterations) {
    ++out.major_iterations;
    const T xx = inner(x, x, h);
    std::size_t best = n;
    T best_val{};
    for (std::size_t j = 0; j < n; ++j) {
      T v = inner(x, points[j], h);
      if (best == n || v < best_val) {
        best = j;
        best_val = v;
      }
    }
    const T improvement = xx - best_val;
    bool optimal;
    if constexpr (std::is_same_v<T, double>) {
      optimal = improvement <= eps * scale;
    } else {
      optimal = sgn(improvement) <= 0;
    }
    if (optimal || std::find(active.begin(), active.end(), best) != active.end()) {
      out.converged = true;
      break;
    }
    active.push_back(best);
    weight.push_back(T(0));

    // minor cycle: move to the affine minimizer, or as far as the simplex allows
    for (std::size_t minor = 0; minor < 10 * dim + 50; ++minor) {
      const std::size_t s = active.size();
      std::vector<std::vector<T>> a(s + 1, std::vector<T>(s + 1, T(0)));
      std::vector<T> b(s + 1, T(0));
      for (std::size_t k = 0; k < s; ++k) {
        for (std::size_t l = 0; l < s; ++l) a[k][l] = inner(points[active[k]], points[active[l]], h);
        a[k][s] = T(1);
        a[s][k] = T(1);
      }
      b[s] = T(1);
      auto sol = detail::solve_dense(a, b);
      if (!sol) {
        // affinely dependent set; drop the newest point
        active.pop_back();
        weight.pop_back();
        break;
      }
      std::vector<T> alpha(sol->begin(), sol->begin() + static_cast<std::ptrdiff_t>(s));
      if (std::all_of(alpha.begin(), alpha.end(), is_pos)) {
        weight = alpha;
        x = combine(weight);
        break;
      }
      T theta(1);
      for (std::size_t k = 0; k < s; ++k) {
        if (is_pos(alpha[k])) continue;
        const T denom = weight[k] - alpha[k];
        if (!is_pos(denom)) continue;
        const T t = weight[k] / denom;
        if (t < theta) theta = t;
      }
      for (std::size_t k = 0; k < s; ++k) weight[k] = theta * alpha[k] + (T(1) - theta) * weight[k];
      std::vector<std::size_t> keep_idx;
      std::vector<T> keep_w;
      for (std::size_t k = 0; k < s; ++k) {
        if (is_pos(weight[k])) {
          keep_idx.push_back(active[k]);
          keep_w.push_back(weight[k]);
        }
      }
      if (keep_idx.empty()) {
        keep_idx.push_back(active.back());
        keep_w.push_back(T(1));
      }
      T total(0);
      for (const auto& w : keep_w) total += w;
      for (auto& w : keep_w) w /= total;
      active = std::move(keep_idx);
      weight = std::move(keep_w);
      x = combine(weight);
    }
  }

  for (std::size_t k = 0; k < active.size(); ++k) out.lambda[active[k]] = weight[k];
  out.point = x;
  return out;
}

}  // namespace credal
