#pragma once

#include "isop/core.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace isop {

/// Orthonormal basis (as columns) of the null space of `m`.
inline Mat null_space(const Mat& m, double rel_tol = tol::rank) {
  const int cols = static_cast<int>(m.cols());
  if (m.rows() == 0) return Mat::Identity(cols, cols);
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
  const Vec& s = svd.singularValues();
  const double cut = rel_tol * (s.size() ? s[0] : 0.0);
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s[i] > cut) ++rank;
  return svd.matrixV().rightCols(cols - rank);
}

inline int numeric_rank(const Mat& m, double rel_tol = tol::rank) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(m);
  const Vec& s = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s[i] > rel_tol * s[0]) ++rank;
  return rank;
}

/// Calls f on every k-subset of {0..n-1} in lexicographic order; stops early
/// when f returns false.
inline void for_each_combination(int n, int k, const std::function<bool(const std::vector<int>&)>& f) {
  if (k < 0 || k > n) return;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  for (;;) {
    if (!f(idx)) return;
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

inline double factorial(int n) { return std::tgamma(n + 1.0); }

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)));
}

/// k-volume of the simplex on k+1 points of R^m, sqrt(det Gram) / k!.
inline double simplex_volume(const std::vector<Vec>& pts) {
  const int k = static_cast<int>(pts.size()) - 1;
  if (k <= 0) return k == 0 ? 1.0 : 0.0;
  Mat e(pts[0].size(), k);
  for (int i = 0; i < k; ++i) e.col(i) = pts[i + 1] - pts[0];
  const double det = (e.transpose() * e).determinant();
  return std::sqrt(std::max(0.0, det)) / factorial(k);
}

struct LpResult {
  enum class Status { optimal, unbounded } status = Status::optimal;
  Vec x;
  double value = 0;
};

/// maximize c.x subject to A x <= b, x >= 0, with b >= 0 so the slack basis
/// is feasible. Dense tableau simplex with Bland's rule.
inline LpResult lp_maximize(const Mat& A, const Vec& b, const Vec& c, double eps = 1e-12) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  require(b.size() == m && c.size() == n, Errc::invalid_input, "LP dimension mismatch");
  require((b.array() >= 0).all(), Errc::invalid_input, "LP needs b >= 0 for the slack start");

  Mat T = Mat::Zero(m + 1, n + m + 1);
  T.topLeftCorner(m, n) = A;
  T.block(0, n, m, m).setIdentity();
  T.topRightCorner(m, 1) = b;
  T.bottomLeftCorner(1, n) = -c.transpose();
  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) basis[i] = n + i;

  const int max_pivots = 50 * (n + m) + 1000;
  for (int it = 0; it < max_pivots; ++it) {
    int enter = -1;
    for (int j = 0; j < n + m; ++j) {
      if (T(m, j) < -eps) {
        enter = j;
        break;
      }
    }
    if (enter < 0) {
      LpResult r;
      r.x = Vec::Zero(n);
      for (int i = 0; i < m; ++i)
        if (basis[i] < n) r.x[basis[i]] = T(i, n + m);
      r.value = c.dot(r.x);
      return r;
    }
    int leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      if (T(i, enter) > eps) {
        const double ratio = T(i, n + m) / T(i, enter);
        if (ratio < best - eps || (ratio <= best + eps && leave >= 0 && basis[i] < basis[leave])) {
          best = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0) return {LpResult::Status::unbounded, Vec(), std::numeric_limits<double>::infinity()};
    T.row(leave) /= T(leave, enter);
    for (int i = 0; i <= m; ++i)
      if (i != leave && T(i, enter) != 0) T.row(i) -= T(i, enter) * T.row(leave);
    basis[leave] = enter;
  }
  throw Error(Errc::non_convergence, "simplex method exceeded its pivot budget");
}

}  // namespace isop
