#ifndef SINKJA_LP_SOLVE_HPP
#define SINKJA_LP_SOLVE_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sinkja/lifted.hpp"
#include "sinkja/projection.hpp"

namespace sinkja {

// Linear objective over lifted points: c_x (theta) on x and c_y (tau) on y,
// with gangster entries removed from every inner product. Costs are scaled
// to unit infinity-norm so that beta has a meaning independent of the
// instance; `scale` restores original units. The quadratic part is either a
// dense n^4 array or a Koopmans-Beckmann factored pair tau[ijkl] = A[ik]B[jl],
// expanded lazily per entry.
class LiftedCost {
 public:
  static LiftedCost dense(MaskPtr mask, std::vector<double> theta,
                          std::vector<double> tau, bool normalize = true) {
    const int n = mask->n();
    LiftedCost c(std::move(mask));
    if (theta.size() != static_cast<std::size_t>(n) * n ||
        tau.size() != static_cast<std::size_t>(n) * n * n * n)
      throw std::invalid_argument("LiftedCost: bad array sizes");
    c.theta_ = std::move(theta);
    c.tau_ = std::move(tau);
    c.factored_ = false;
    c.zero_masked_entries();
    if (normalize) c.normalize_sup();
    return c;
  }

  static LiftedCost koopmans_beckmann(MaskPtr mask, std::vector<double> flow,
                                      std::vector<double> dist,
                                      bool normalize = true) {
    const int n = mask->n();
    LiftedCost c(std::move(mask));
    if (flow.size() != static_cast<std::size_t>(n) * n ||
        dist.size() != static_cast<std::size_t>(n) * n)
      throw std::invalid_argument("LiftedCost: bad factor sizes");
    c.theta_.assign(static_cast<std::size_t>(n) * n, 0.0);
    c.A_ = std::move(flow);
    c.B_ = std::move(dist);
    c.factored_ = true;
    if (normalize) c.normalize_sup();
    return c;
  }

  int n() const { return n_; }
  double scale() const { return scale_; }
  const MaskPtr& mask() const { return mask_; }

  double cx(int i, int j) const { return theta_[mat(i, j)]; }

  // Normalized tau entry; zero on the mask.
  double cy(int i, int j, int k, int l) const {
    if (mask_->is_masked(i, j, k, l)) return 0.0;
    return factored_ ? A_[mat(i, k)] * B_[mat(j, l)]
                     : tau_[ten(i, j, k, l)];
  }

 private:
  explicit LiftedCost(MaskPtr mask) : n_(mask->n()), mask_(std::move(mask)) {}

  std::size_t mat(int i, int j) const {
    return static_cast<std::size_t>(i) * n_ + j;
  }
  std::size_t ten(int i, int j, int k, int l) const {
    return ((static_cast<std::size_t>(i) * n_ + j) * n_ + k) * n_ + l;
  }

  void zero_masked_entries() {
    if (!mask_->enabled()) return;
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        for (int k = 0; k < n_; ++k)
          for (int l = 0; l < n_; ++l)
            if (mask_->is_masked(i, j, k, l)) tau_[ten(i, j, k, l)] = 0.0;
  }

  double sup_norm() const {
    double m = 0.0;
    for (double v : theta_) m = std::max(m, std::abs(v));
    if (factored_) {
      // Unmasked entries have either i==k, j==l (diagonal pair) or
      // i!=k, j!=l; the factors range independently in each case.
      double ad = 0.0, bd = 0.0, ao = 0.0, bo = 0.0;
      for (int i = 0; i < n_; ++i)
        for (int k = 0; k < n_; ++k) {
          const double a = std::abs(A_[mat(i, k)]);
          const double b = std::abs(B_[mat(i, k)]);
          if (i == k) { ad = std::max(ad, a); bd = std::max(bd, b); }
          else { ao = std::max(ao, a); bo = std::max(bo, b); }
        }
      if (mask_->enabled()) {
        m = std::max(m, std::max(ad * bd, ao * bo));
      } else {
        m = std::max(m, std::max(ad, ao) * std::max(bd, bo));
      }
    } else {
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
          for (int k = 0; k < n_; ++k)
            for (int l = 0; l < n_; ++l)
              if (!mask_->is_masked(i, j, k, l))
                m = std::max(m, std::abs(tau_[ten(i, j, k, l)]));
    }
    return m;
  }

  void normalize_sup() {
    const double m = sup_norm();
    scale_ = m > 0.0 ? m : 1.0;
    const double inv = 1.0 / scale_;
    for (double& v : theta_) v *= inv;
    for (double& v : tau_) v *= inv;
    for (double& v : A_) v *= inv;  // B_ untouched: product carries the factor
  }

  int n_;
  MaskPtr mask_;
  std::vector<double> theta_;
  std::vector<double> tau_;
  std::vector<double> A_, B_;
  bool factored_ = false;
  double scale_ = 1.0;
};

// <c, p> over unmasked coordinates, reported in original cost units.
inline double energy(const LiftedCost& cost, const LiftedPoint& p) {
  const int n = p.n();
  if (cost.n() != n) throw std::invalid_argument("energy: dimension mismatch");
  double e = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) e += cost.cx(i, j) * p.x.value(i, j);
  const GangsterMask& mask = *cost.mask();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          if (!mask.is_masked(i, j, k, l))
            e += cost.cy(i, j, k, l) * p.y.value(i, j, k, l);
  return e * cost.scale();
}

enum class OuterMethod : std::uint8_t {
  regularization,
  proximal,
  accumulation,
  accumulation_square
};

inline const char* method_name(OuterMethod m) {
  switch (m) {
    case OuterMethod::regularization: return "regularization";
    case OuterMethod::proximal: return "proximal";
    case OuterMethod::accumulation: return "accumulation";
    case OuterMethod::accumulation_square: return "accumulation-square";
  }
  return "?";
}

inline OuterMethod parse_method(const std::string& s) {
  if (s == "regularization") return OuterMethod::regularization;
  if (s == "proximal") return OuterMethod::proximal;
  if (s == "accumulation") return OuterMethod::accumulation;
  if (s == "accumulation-square" || s == "accumulation_square")
    return OuterMethod::accumulation_square;
  throw std::invalid_argument("unknown method: " + s);
}

struct OuterConfig {
  OuterMethod method = OuterMethod::accumulation;
  double beta0 = 1.0;
  double eps_outer = 1e-2;  // relative-energy stopping tolerance
  int max_outer = 50;
  JapProjectionConfig inner;
};

struct OuterRecord {
  double energy = 0.0;
  int inner_cycles = 0;
  double inner_residual = 0.0;
  bool inner_converged = false;
  // Largest |log| over the reference measure used by this iteration; finite
  // as long as the accumulation has not under/overflowed.
  double max_abs_log_u0 = 0.0;
};

struct SolveTrace {
  std::vector<OuterRecord> iterations;
  LiftedPoint solution;
  // Reference measure the next external iteration would have used; running
  // one more regularized solve from it at a tighter inner tolerance polishes
  // the bound at the final effective beta.
  LiftedPoint u0_final;
  bool converged = false;  // outer relative-energy criterion met

  explicit SolveTrace(LiftedPoint p) : solution(p), u0_final(std::move(p)) {}

  int outer_iterations() const { return static_cast<int>(iterations.size()); }
  long total_inner_cycles() const {
    long c = 0;
    for (const auto& r : iterations) c += r.inner_cycles;
    return c;
  }
  bool all_inner_converged() const {
    for (const auto& r : iterations)
      if (!r.inner_converged) return false;
    return true;
  }
};

namespace detail {

// Largest finite-domain magnitude of the logs of a point, ignoring the
// structural -inf entries on the mask.
inline double max_abs_log(const LiftedPoint& p) {
  double m = 0.0;
  for (double lv : p.x.logs()) m = std::max(m, std::abs(lv));
  for (double lv : p.y.logs())
    if (!is_log_zero(lv)) m = std::max(m, std::abs(lv));
  return m;
}

// Target of the regularized problem in log space: log u0 - beta * c.
inline LiftedPoint regularized_target(const LiftedCost& cost, double beta,
                                      const LiftedPoint& u0) {
  const int n = u0.n();
  LiftedPoint t = u0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) t.x.log_at(i, j) -= beta * cost.cx(i, j);
  const GangsterMask& mask = *u0.mask();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double& lv = t.y.log_at(i, j, k, l);
          if (mask.is_masked(i, j, k, l))
            lv = log_zero;
          else
            lv -= beta * cost.cy(i, j, k, l);
        }
  return t;
}

inline bool outer_stop(double e_prev, double e_next, double eps) {
  return std::abs(e_next - e_prev) / std::max(1.0, std::abs(e_prev)) < eps;
}

}  // namespace detail

// Minimizer of <c,v> + beta^-1 KL(v|u0) over the lifted polytope, i.e. the
// KL projection of u0 * exp(-beta c) onto it. beta = 0 degenerates to the
// plain projection of u0.
inline std::pair<LiftedPoint, ProjectionStats> solve_regularized(
    const LiftedCost& cost, double beta, const LiftedPoint& u0,
    const JapProjectionConfig& inner = {}) {
  return project_jap(detail::regularized_target(cost, beta, u0), inner);
}

// Proximal scheme: v_{k+1} = argmin <c,v> + beta0^-1 KL(v|v_k), starting
// from the all-ones prox center; after k steps this equals the regularized
// solution at beta = k*beta0.
inline SolveTrace solve_proximal(const LiftedCost& cost, const OuterConfig& cfg) {
  LiftedPoint v = LiftedPoint::ones(cost.mask());
  SolveTrace trace(v);
  double e_prev = 0.0;
  for (int k = 1; k <= cfg.max_outer; ++k) {
    const double u0_norm = detail::max_abs_log(v);
    auto [next, st] = solve_regularized(cost, cfg.beta0, v, cfg.inner);
    v = std::move(next);
    const double e = energy(cost, v);
    trace.iterations.push_back(
        {e, st.cycles_used, st.final_residual, st.converged, u0_norm});
    if (k > 1 && detail::outer_stop(e_prev, e, cfg.eps_outer)) {
      trace.converged = true;
      break;
    }
    e_prev = e;
  }
  trace.u0_final = v;
  trace.solution = std::move(v);
  return trace;
}

// Accumulation scheme: every external iteration solves the regularized
// problem at beta0 with reference measure u0 equal to the running
// elementwise product of all previous iterates (or the square of the last
// one), accumulated in log space so the product never underflows. With the
// product rule the effective beta after k iterations is 2^(k-1) beta0.
inline SolveTrace solve_accumulation(const LiftedCost& cost, const OuterConfig& cfg) {
  if (cfg.method != OuterMethod::accumulation &&
      cfg.method != OuterMethod::accumulation_square)
    throw std::invalid_argument("solve_accumulation: wrong method in config");
  const bool square = cfg.method == OuterMethod::accumulation_square;
  LiftedPoint u0 = LiftedPoint::ones(cost.mask());
  SolveTrace trace(u0);
  double e_prev = 0.0;
  for (int k = 1; k <= cfg.max_outer; ++k) {
    const double u0_norm = detail::max_abs_log(u0);
    auto [v, st] = solve_regularized(cost, cfg.beta0, u0, cfg.inner);
    const double e = energy(cost, v);
    trace.iterations.push_back(
        {e, st.cycles_used, st.final_residual, st.converged, u0_norm});
    if (square) {
      u0 = hadamard_log(v, v);
    } else {
      u0 = hadamard_log(u0, v);
    }
    trace.solution = std::move(v);
    if (k > 1 && detail::outer_stop(e_prev, e, cfg.eps_outer)) {
      trace.converged = true;
      break;
    }
    e_prev = e;
  }
  trace.u0_final = u0;
  return trace;
}

// Dispatch on cfg.method. `regularization` performs one external iteration
// at beta = beta0 from the all-ones measure.
inline SolveTrace solve_lp(const LiftedCost& cost, const OuterConfig& cfg) {
  if (!(cfg.beta0 > 0.0) || !(cfg.eps_outer > 0.0) || cfg.max_outer < 1)
    throw std::invalid_argument("solve_lp: bad outer config");
  switch (cfg.method) {
    case OuterMethod::regularization: {
      LiftedPoint u0 = LiftedPoint::ones(cost.mask());
      auto [v, st] = solve_regularized(cost, cfg.beta0, u0, cfg.inner);
      SolveTrace trace(std::move(v));
      trace.iterations.push_back({energy(cost, trace.solution), st.cycles_used,
                                  st.final_residual, st.converged, 0.0});
      trace.converged = st.converged;
      return trace;
    }
    case OuterMethod::proximal:
      return solve_proximal(cost, cfg);
    case OuterMethod::accumulation:
    case OuterMethod::accumulation_square:
      return solve_accumulation(cost, cfg);
  }
  throw std::logic_error("solve_lp: unreachable");
}

}  // namespace sinkja

#endif
