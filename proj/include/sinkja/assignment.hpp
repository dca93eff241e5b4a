#ifndef SINKJA_ASSIGNMENT_HPP
#define SINKJA_ASSIGNMENT_HPP

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace sinkja {

// Exact linear assignment by shortest augmenting paths with potentials
// (Jonker-Volgenant style), O(n^3). cost is n x n row-major; the result maps
// each row to its column in a minimum-total-cost perfect matching.
inline std::vector<int> solve_lap_min(int n, const std::vector<double>& cost) {
  if (n < 1 || cost.size() != static_cast<std::size_t>(n) * n)
    throw std::invalid_argument("solve_lap_min: bad input");
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);  // p[col] = matched row, 1-based
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = -1;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur =
            cost[static_cast<std::size_t>(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> perm(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j]) perm[p[j] - 1] = j - 1;
  return perm;
}

inline double lap_value(int n, const std::vector<double>& score,
                        const std::vector<int>& perm) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += score[static_cast<std::size_t>(i) * n + perm[i]];
  return s;
}

// Maximum-score assignment; ties between optimal permutations broken toward
// the lexicographically smallest one by fixing rows in order and accepting
// the first column whose completion still reaches the optimum (within a
// rounding-noise tolerance, since completions are re-summed per candidate).
inline std::vector<int> solve_lap_max_lex(int n, const std::vector<double>& score) {
  std::vector<double> neg(score.size());
  for (std::size_t t = 0; t < score.size(); ++t) neg[t] = -score[t];
  const double best = lap_value(n, score, solve_lap_min(n, neg));
  const double tol = 1e-9 * std::max(1.0, std::abs(best));

  std::vector<int> result(n, -1);
  std::vector<int> cols(n);
  for (int j = 0; j < n; ++j) cols[j] = j;
  double prefix = 0.0;
  for (int i = 0; i < n; ++i) {
    const int m = n - i - 1;  // rows below i
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const int j = cols[c];
      double completion = prefix + score[static_cast<std::size_t>(i) * n + j];
      if (m > 0) {
        std::vector<double> red(static_cast<std::size_t>(m) * m);
        for (int r = 0; r < m; ++r)
          for (std::size_t c2 = 0, w = 0; c2 < cols.size(); ++c2) {
            if (c2 == c) continue;
            red[static_cast<std::size_t>(r) * m + w++] =
                -score[static_cast<std::size_t>(i + 1 + r) * n + cols[c2]];
          }
        const auto sub = solve_lap_min(m, red);
        for (int r = 0; r < m; ++r) completion -= red[static_cast<std::size_t>(r) * m + sub[r]];
      }
      if (completion >= best - tol) {
        result[i] = j;
        prefix += score[static_cast<std::size_t>(i) * n + j];
        cols.erase(cols.begin() + static_cast<std::ptrdiff_t>(c));
        break;
      }
    }
    if (result[i] < 0) throw std::logic_error("solve_lap_max_lex: no completion");
  }
  return result;
}

}  // namespace sinkja

#endif
