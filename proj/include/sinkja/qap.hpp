#ifndef SINKJA_QAP_HPP
#define SINKJA_QAP_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sinkja/assignment.hpp"
#include "sinkja/lifted.hpp"
#include "sinkja/lp_solve.hpp"

namespace sinkja {

// Bijection on {0..n-1}; files use 1-based images.
struct Assignment {
  std::vector<int> perm;

  int n() const { return static_cast<int>(perm.size()); }
  static Assignment identity(int n) {
    Assignment a;
    a.perm.resize(n);
    std::iota(a.perm.begin(), a.perm.end(), 0);
    return a;
  }
  bool valid() const {
    std::vector<char> hit(perm.size(), 0);
    for (int v : perm) {
      if (v < 0 || v >= n() || hit[v]) return false;
      hit[v] = 1;
    }
    return true;
  }
};

// Lawler cost (theta, tau) or Koopmans-Beckmann factored (flow A, distance B,
// tau[ijkl] = A[ik] B[jl], theta = 0).
class QapInstance {
 public:
  enum class Form { lawler, koopmans_beckmann };

  static QapInstance lawler(int n, std::vector<double> theta,
                            std::vector<double> tau, std::string name = "") {
    QapInstance q(n, Form::lawler, std::move(name));
    if (theta.size() != q.nn() || tau.size() != q.nn() * q.nn())
      throw std::invalid_argument("QapInstance: bad Lawler sizes");
    q.theta_ = std::move(theta);
    q.tau_ = std::move(tau);
    return q;
  }

  static QapInstance koopmans_beckmann(int n, std::vector<double> A,
                                       std::vector<double> B,
                                       std::string name = "") {
    QapInstance q(n, Form::koopmans_beckmann, std::move(name));
    if (A.size() != q.nn() || B.size() != q.nn())
      throw std::invalid_argument("QapInstance: bad KB sizes");
    q.A_ = std::move(A);
    q.B_ = std::move(B);
    return q;
  }

  int n() const { return n_; }
  Form form() const { return form_; }
  const std::string& name() const { return name_; }

  double theta(int i, int j) const {
    return form_ == Form::lawler ? theta_[mat(i, j)] : 0.0;
  }
  double tau(int i, int j, int k, int l) const {
    return form_ == Form::lawler
               ? tau_[(mat(i, j) * n_ + k) * n_ + l]
               : A_[mat(i, k)] * B_[mat(j, l)];
  }
  const std::vector<double>& flow() const { return A_; }
  const std::vector<double>& dist() const { return B_; }

 private:
  QapInstance(int n, Form f, std::string name)
      : n_(n), form_(f), name_(std::move(name)) {
    if (n < 1) throw std::invalid_argument("QapInstance: n must be >= 1");
  }
  std::size_t nn() const { return static_cast<std::size_t>(n_) * n_; }
  std::size_t mat(int i, int j) const {
    return static_cast<std::size_t>(i) * n_ + j;
  }

  int n_;
  Form form_;
  std::string name_;
  std::vector<double> theta_, tau_, A_, B_;
};

// Exact energy of a permutation. For the KB form this is
// sum_{ik} A[i][k] * B[a(i)][a(k)].
inline double qap_energy(const QapInstance& inst, const Assignment& a) {
  const int n = inst.n();
  if (a.n() != n || !a.valid())
    throw std::invalid_argument("qap_energy: invalid permutation");
  double e = 0.0;
  if (inst.form() == QapInstance::Form::koopmans_beckmann) {
    const auto& A = inst.flow();
    const auto& B = inst.dist();
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        e += A[static_cast<std::size_t>(i) * n + k] *
             B[static_cast<std::size_t>(a.perm[i]) * n + a.perm[k]];
  } else {
    for (int i = 0; i < n; ++i) {
      e += inst.theta(i, a.perm[i]);
      for (int k = 0; k < n; ++k) e += inst.tau(i, a.perm[i], k, a.perm[k]);
    }
  }
  return e;
}

inline LiftedCost lift_cost(const QapInstance& inst, MaskPtr mask) {
  const int n = inst.n();
  if (mask->n() != n) throw std::invalid_argument("lift_cost: mask mismatch");
  if (inst.form() == QapInstance::Form::koopmans_beckmann)
    return LiftedCost::koopmans_beckmann(std::move(mask), inst.flow(), inst.dist());
  std::vector<double> theta(static_cast<std::size_t>(n) * n);
  std::vector<double> tau(theta.size() * theta.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      theta[static_cast<std::size_t>(i) * n + j] = inst.theta(i, j);
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          tau[((static_cast<std::size_t>(i) * n + j) * n + k) * n + l] =
              inst.tau(i, j, k, l);
    }
  return LiftedCost::dense(std::move(mask), std::move(theta), std::move(tau));
}

// x = permutation matrix, y = outer product; exactly feasible, gangster
// entries included.
inline LiftedPoint lift_permutation(const Assignment& a, MaskPtr mask) {
  const int n = mask->n();
  if (a.n() != n || !a.valid())
    throw std::invalid_argument("lift_permutation: invalid permutation");
  PositiveMatrix x(n, log_zero);
  for (int i = 0; i < n; ++i) x.log_at(i, a.perm[i]) = 0.0;
  LiftedTensor y(std::move(mask), log_zero);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) y.log_at(i, a.perm[i], k, a.perm[k]) = 0.0;
  return LiftedPoint(std::move(x), std::move(y));
}

// argmax_P <x, P> by exact linear assignment; ties resolved toward the
// lexicographically smallest permutation.
inline Assignment round_to_permutation(const PositiveMatrix& x) {
  const int n = x.n();
  std::vector<double> score(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double v = x.value(i, j);
      if (v < 0.0 || std::isnan(v))
        throw std::invalid_argument("round_to_permutation: negative entry");
      score[static_cast<std::size_t>(i) * n + j] = v;
    }
  Assignment a;
  a.perm = solve_lap_max_lex(n, score);
  return a;
}

// Exhaustive minimum over all n! permutations, lexicographically first among
// ties. Guarded at n <= 9.
inline std::pair<Assignment, double> brute_force(const QapInstance& inst) {
  const int n = inst.n();
  if (n > 9) throw std::invalid_argument("brute_force: n too large (max 9)");
  Assignment cur = Assignment::identity(n);
  Assignment best = cur;
  double best_e = qap_energy(inst, cur);
  while (std::next_permutation(cur.perm.begin(), cur.perm.end())) {
    const double e = qap_energy(inst, cur);
    if (e < best_e) {
      best_e = e;
      best = cur;
    }
  }
  return {best, best_e};
}

// Random symmetric zero-diagonal KB instance with integer entries in
// [0, 99]; the modulo draw keeps results identical across platforms.
inline QapInstance random_kb_instance(int n, std::uint64_t seed,
                                      std::string name = "") {
  std::mt19937_64 rng(seed);
  std::vector<double> A(static_cast<std::size_t>(n) * n, 0.0), B = A;
  for (int i = 0; i < n; ++i)
    for (int k = i + 1; k < n; ++k) {
      const double a = static_cast<double>(rng() % 100);
      const double b = static_cast<double>(rng() % 100);
      A[static_cast<std::size_t>(i) * n + k] = A[static_cast<std::size_t>(k) * n + i] = a;
      B[static_cast<std::size_t>(i) * n + k] = B[static_cast<std::size_t>(k) * n + i] = b;
    }
  if (name.empty()) name = "rand" + std::to_string(n) + "-" + std::to_string(seed);
  return QapInstance::koopmans_beckmann(n, std::move(A), std::move(B), std::move(name));
}

// Pure linear instance (tau = 0) with random integer theta; the lifted LP is
// integral for these, so bounds collapse onto the assignment optimum.
inline QapInstance random_linear_instance(int n, std::uint64_t seed,
                                          std::string name = "") {
  std::mt19937_64 rng(seed);
  std::vector<double> theta(static_cast<std::size_t>(n) * n);
  for (auto& v : theta) v = static_cast<double>(rng() % 100);
  std::vector<double> tau(theta.size() * theta.size(), 0.0);
  if (name.empty()) name = "lin" + std::to_string(n) + "-" + std::to_string(seed);
  return QapInstance::lawler(n, std::move(theta), std::move(tau), std::move(name));
}

struct BoundsReport {
  double lower = 0.0;          // relaxation energy of the LP solution
  double upper = 0.0;          // energy of the rounded permutation
  Assignment perm;
  double normalized_gap = 0.0; // (upper - lower) / max(1, |upper|)
  int outer_iterations = 0;
  long inner_cycles = 0;
  double wall_ms = 0.0;
  bool converged = false;
  std::vector<double> energies;  // per-external-iteration trace
};

// Dense lifted objects are capped by default; beyond this the O(n^4) working
// set needs an explicit opt-in.
inline constexpr int default_max_dense_n = 48;

// End-to-end bound computation: lift, solve the relaxation, take its energy
// as the lower bound, round x to a permutation for the upper bound.
inline BoundsReport solve(const QapInstance& inst, const OuterConfig& cfg,
                          bool gangster = true, bool allow_large = false) {
  if (inst.n() > default_max_dense_n && !allow_large)
    throw std::invalid_argument(
        "solve: n exceeds the dense working-set cap; pass allow_large to override");
  const auto t0 = std::chrono::steady_clock::now();
  MaskPtr mask = build_gangster_mask(inst.n(), gangster);
  const LiftedCost cost = lift_cost(inst, mask);
  const SolveTrace trace = solve_lp(cost, cfg);

  BoundsReport rep;
  rep.lower = energy(cost, trace.solution);
  rep.perm = round_to_permutation(trace.solution.x);
  rep.upper = qap_energy(inst, rep.perm);
  rep.normalized_gap = (rep.upper - rep.lower) / std::max(1.0, std::abs(rep.upper));
  rep.outer_iterations = trace.outer_iterations();
  rep.inner_cycles = trace.total_inner_cycles();
  rep.converged = trace.converged;
  rep.energies.reserve(trace.iterations.size());
  for (const auto& r : trace.iterations) rep.energies.push_back(r.energy);
  rep.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  return rep;
}

}  // namespace sinkja

#endif
