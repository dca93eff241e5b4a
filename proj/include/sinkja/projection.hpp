#ifndef SINKJA_PROJECTION_HPP
#define SINKJA_PROJECTION_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sinkja/lifted.hpp"
#include "sinkja/log_space.hpp"
#include "sinkja/parallel.hpp"

namespace sinkja {

// The lifted polytope is the intersection of four coordinate-permuted
// copies of the one-sided local polytope (OLP). Each view is an involution
// on index space; the gangster set is pointwise invariant under all four.
enum class OlpView { plain, diamond, transpose, transpose_diamond };

constexpr std::array<OlpView, 4> default_cycle_order = {
    OlpView::plain, OlpView::diamond, OlpView::transpose,
    OlpView::transpose_diamond};

inline const char* view_name(OlpView v) {
  switch (v) {
    case OlpView::plain: return "plain";
    case OlpView::diamond: return "diamond";
    case OlpView::transpose: return "transpose";
    case OlpView::transpose_diamond: return "transpose_diamond";
  }
  return "?";
}

struct JapProjectionConfig {
  double eps_inner = 1e-2;   // max constraint violation at exit
  int max_cycles = 1000;     // cap on four-projection cycles
  std::array<OlpView, 4> cycle_order = default_cycle_order;
  unsigned threads = 1;      // 0 = hardware concurrency
  bool record_residuals = false;
};

struct ProjectionStats {
  int cycles_used = 0;
  double final_residual = 0.0;
  bool converged = false;
  std::vector<double> residual_history;  // one entry per cycle when recorded
};

// KL-nearest row-stochastic matrix with row sums mu:
// x*[i][j] = z[i][j] * mu[i] / sum_s z[i][s].
inline PositiveMatrix project_row_stochastic(const PositiveMatrix& z,
                                             std::span<const double> mu) {
  const int n = z.n();
  if (static_cast<int>(mu.size()) != n)
    throw std::invalid_argument("project_row_stochastic: mu size != n");
  if (!z.strictly_positive())
    throw std::invalid_argument("project_row_stochastic: nonpositive entry in z");
  for (double m : mu)
    if (!(m > 0.0) || !std::isfinite(m))
      throw std::invalid_argument("project_row_stochastic: nonpositive mu");
  PositiveMatrix out(n);
  for (int i = 0; i < n; ++i) {
    const double row =
        log_sum_exp(n, [&](int s) { return z.log_at(i, s); });
    const double lmu = std::log(mu[i]);
    for (int j = 0; j < n; ++j)
      out.log_at(i, j) = z.log_at(i, j) + lmu - row;
  }
  return out;
}

// Merges sum_k a_k KL(x | b_k) into a single (sum_k a_k) KL(x | b*) term,
// where b* is the a-weighted geometric mean of the b_k.
inline std::pair<double, double> kl_geometric_merge(std::span<const double> a,
                                                    std::span<const double> b) {
  if (a.empty() || a.size() != b.size())
    throw std::invalid_argument("kl_geometric_merge: empty or mismatched input");
  double wsum = 0.0, num = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (!(a[k] > 0.0) || !(b[k] > 0.0))
      throw std::invalid_argument("kl_geometric_merge: nonpositive input");
    wsum += a[k];
    num += a[k] * std::log(b[k]);
  }
  return {wsum, std::exp(num / wsum)};
}

namespace detail {

// Source index of entry (i,j,k,l) of the viewed tensor inside the raw one.
inline std::array<int, 4> view_source(OlpView v, int i, int j, int k, int l) {
  switch (v) {
    case OlpView::plain: return {i, j, k, l};
    case OlpView::diamond: return {k, l, i, j};            // y^d[ijkl] = y[klij]
    case OlpView::transpose: return {j, i, l, k};          // y^T[ijkl] = y[jilk]
    case OlpView::transpose_diamond: return {l, k, j, i};  // (y^T)^d[ijkl] = y[lkji]
  }
  return {i, j, k, l};
}

inline bool view_transposes_x(OlpView v) {
  return v == OlpView::transpose || v == OlpView::transpose_diamond;
}

struct OlpScratch {
  std::vector<double> log_r;   // n^3: log sum_s w[i,j,k,s], view coords
  std::vector<double> log_q;   // n^2: merged per-cell target, then log x'
  void resize(int n) {
    log_r.assign(static_cast<std::size_t>(n) * n * n, 0.0);
    log_q.assign(static_cast<std::size_t>(n) * n, 0.0);
  }
};

// Closed-form KL projection onto one OLP view, in place on p. The solution
// for target (z, w) is
//   q[ij]    = exp((sum_k log r[ijk] + log z[ij]) / (n+1)),  r[ijk] = sum_s w[ijks]
//   x[ij]    = q[ij] / sum_j q[ij]
//   y[ijkl]  = x[ij] w[ijkl] / r[ijk]
// evaluated in log space over unmasked entries. Every (i,j) block is an
// independent subproblem; phase boundaries keep the in-place update safe.
inline void project_olp_inplace(LiftedPoint& p, OlpView view, unsigned threads,
                                OlpScratch& s) {
  const int n = p.n();
  const GangsterMask& mask = *p.mask();
  const bool tx = view_transposes_x(view);
  auto& ylog = p.y.logs();
  auto& xlog = p.x.logs();
  s.resize(n);

  const std::size_t blocks = static_cast<std::size_t>(n) * n;
  // Thread spawn costs dwarf the arithmetic below ~15^4 entries.
  if (p.y.size() < 50000) threads = 1;

  // Phase 1: row sums r over the viewed tensor.
  par_for(blocks, threads, [&](std::size_t blk) {
    const int i = static_cast<int>(blk) / n;
    const int j = static_cast<int>(blk) % n;
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
      const double lr = log_sum_exp(n, [&](int l) {
        if (mask.is_masked(i, j, k, l)) return log_zero;
        const auto src = view_source(view, i, j, k, l);
        return ylog[p.y.idx(src[0], src[1], src[2], src[3])];
      });
      s.log_r[(blk * n) + k] = lr;
      acc += lr;
    }
    s.log_q[blk] = acc;  // sum_k log r; z folded in below
  });

  // Phase 2: merge with z, row-normalize x' (sequential, O(n^2)).
  const double inv = 1.0 / (n + 1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double lz = tx ? xlog[p.x.idx(j, i)] : xlog[p.x.idx(i, j)];
      if (!std::isfinite(lz))
        throw std::invalid_argument("project_olp: nonpositive entry in z");
      double& lq = s.log_q[p.x.idx(i, j)];
      if (!std::isfinite(lq))
        throw std::runtime_error("project_olp: empty lifted row sum");
      lq = (lq + lz) * inv;
    }
  for (int i = 0; i < n; ++i) {
    const double row =
        log_sum_exp(n, [&](int j) { return s.log_q[p.x.idx(i, j)]; });
    for (int j = 0; j < n; ++j) s.log_q[p.x.idx(i, j)] -= row;
  }

  // Phase 3: rescale y in place; each source entry is touched exactly once
  // because the view map is a bijection.
  par_for(blocks, threads, [&](std::size_t blk) {
    const int i = static_cast<int>(blk) / n;
    const int j = static_cast<int>(blk) % n;
    const double lx = s.log_q[blk];
    for (int k = 0; k < n; ++k) {
      const double lr = s.log_r[(blk * n) + k];
      for (int l = 0; l < n; ++l) {
        const auto src = view_source(view, i, j, k, l);
        double& lv = ylog[p.y.idx(src[0], src[1], src[2], src[3])];
        lv = mask.is_masked(i, j, k, l) ? log_zero : lx + lv - lr;
      }
    }
  });

  // Phase 4: write x back (transposed for the transpose views).
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      xlog[tx ? p.x.idx(j, i) : p.x.idx(i, j)] = s.log_q[p.x.idx(i, j)];
}

}  // namespace detail

// Closed-form KL projection of target (z, w) onto the plain OLP.
inline LiftedPoint project_olp(const PositiveMatrix& z, const LiftedTensor& w,
                               unsigned threads = 1) {
  if (z.n() != w.n())
    throw std::invalid_argument("project_olp: dimension mismatch");
  LiftedPoint p(z, w);
  detail::OlpScratch s;
  detail::project_olp_inplace(p, OlpView::plain, threads, s);
  return p;
}

// Projection onto one of the four OLP views: transform in, project, transform
// back, realized as index remapping rather than materialized copies.
inline LiftedPoint project_olp_variant(const LiftedPoint& target, OlpView view,
                                       unsigned threads = 1) {
  LiftedPoint p = target;
  detail::OlpScratch s;
  detail::project_olp_inplace(p, view, threads, s);
  return p;
}

// Max absolute violation across the six equality families plus the largest
// magnitude sitting on a gangster entry.
inline double jap_residual(const LiftedPoint& p) {
  const int n = p.n();
  const GangsterMask& mask = *p.mask();
  double worst = 0.0;
  auto bump = [&](double v) { worst = std::max(worst, std::abs(v)); };

  std::vector<double> xv(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) xv[p.x.idx(i, j)] = p.x.value(i, j);

  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += xv[p.x.idx(i, j)];
    bump(s - 1.0);
  }
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += xv[p.x.idx(i, j)];
    bump(s - 1.0);
  }

  // sum_l y[ijkl] = x[ij] and sum_k y[ijkl] = x[ij]
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) s += p.y.value(i, j, k, l);
        bump(s - xv[p.x.idx(i, j)]);
      }
      for (int l = 0; l < n; ++l) {
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += p.y.value(i, j, k, l);
        bump(s - xv[p.x.idx(i, j)]);
      }
    }
  // sum_j y[ijkl] = x[kl] and sum_i y[ijkl] = x[kl]
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += p.y.value(i, j, k, l);
        bump(s - xv[p.x.idx(k, l)]);
      }
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += p.y.value(i, j, k, l);
        bump(s - xv[p.x.idx(k, l)]);
      }
    }

  if (mask.enabled())
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l)
            if (mask.is_masked(i, j, k, l)) bump(p.y.value(i, j, k, l));
  return worst;
}

// Alternating Bregman projections onto the four OLP views; converges to the
// KL projection of the target onto the lifted polytope (the intersection is
// strictly feasible off the mask). The residual is checked once per full
// cycle. Non-convergence is reported through the stats, never thrown.
inline std::pair<LiftedPoint, ProjectionStats> project_jap(
    const LiftedPoint& target, const JapProjectionConfig& cfg = {}) {
  if (!(cfg.eps_inner > 0.0) || cfg.max_cycles < 1)
    throw std::invalid_argument("project_jap: bad config");
  for (OlpView v : default_cycle_order)
    if (std::find(cfg.cycle_order.begin(), cfg.cycle_order.end(), v) ==
        cfg.cycle_order.end())
      throw std::invalid_argument("project_jap: cycle_order must cover all four views");
  const int n = target.n();

  if (n == 1) {
    // The feasible set is the single point x = [1], y = [1].
    LiftedPoint p = LiftedPoint::ones(target.mask());
    ProjectionStats st;
    st.converged = true;
    return {std::move(p), st};
  }

  if (!target.x.strictly_positive() || !target.y.strictly_positive_off_mask())
    throw std::invalid_argument("project_jap: target not strictly positive off mask");

  LiftedPoint p = target;
  detail::OlpScratch scratch;
  ProjectionStats st;
  for (int cycle = 1; cycle <= cfg.max_cycles; ++cycle) {
    for (OlpView v : cfg.cycle_order)
      detail::project_olp_inplace(p, v, cfg.threads, scratch);
    const double res = jap_residual(p);
    st.cycles_used = cycle;
    st.final_residual = res;
    if (cfg.record_residuals) st.residual_history.push_back(res);
    if (res <= cfg.eps_inner) {
      st.converged = true;
      break;
    }
  }
  return {std::move(p), st};
}

}  // namespace sinkja

#endif
