#ifndef SINKJA_LIFTED_HPP
#define SINKJA_LIFTED_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <vector>

#include "sinkja/log_space.hpp"

namespace sinkja {

// Structural-zero pattern of the lifted variable y: entries y[i][j][i][l]
// with j != l and y[j][i][l][i] with j != l vanish for every lifted
// permutation. Membership is arithmetic, so nothing is stored beyond the
// dimension and an on/off switch.
class GangsterMask {
 public:
  GangsterMask(int n, bool enabled) : n_(n), enabled_(enabled) {
    if (n < 1) throw std::invalid_argument("GangsterMask: n must be >= 1");
  }

  int n() const { return n_; }
  bool enabled() const { return enabled_; }

  bool is_masked(int i, int j, int k, int l) const {
    return enabled_ && ((i == k && j != l) || (j == l && i != k));
  }

  // |Gamma| = 2 n^2 (n-1) when enabled.
  std::size_t size() const {
    if (!enabled_) return 0;
    return 2ull * n_ * n_ * (n_ - 1);
  }

  std::vector<std::array<int, 4>> indices() const {
    std::vector<std::array<int, 4>> out;
    out.reserve(size());
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        for (int k = 0; k < n_; ++k)
          for (int l = 0; l < n_; ++l)
            if (is_masked(i, j, k, l)) out.push_back({i, j, k, l});
    return out;
  }

  friend bool operator==(const GangsterMask& a, const GangsterMask& b) {
    return a.n_ == b.n_ && a.enabled_ == b.enabled_;
  }

 private:
  int n_;
  bool enabled_;
};

using MaskPtr = std::shared_ptr<const GangsterMask>;

inline MaskPtr build_gangster_mask(int n, bool enabled) {
  return std::make_shared<const GangsterMask>(n, enabled);
}

// n x n matrix of nonnegative values kept as natural logs; -inf encodes an
// exact zero. Solver iterates are strictly positive (all logs finite);
// lifted permutations use the -inf encoding.
class PositiveMatrix {
 public:
  explicit PositiveMatrix(int n, double log_value = 0.0)
      : n_(check_dim(n)), log_(static_cast<std::size_t>(n) * n, log_value) {}

  static PositiveMatrix from_values(int n, const std::vector<double>& values) {
    PositiveMatrix m(n);
    if (values.size() != m.log_.size())
      throw std::invalid_argument("PositiveMatrix: value count != n*n");
    for (std::size_t p = 0; p < values.size(); ++p) {
      if (values[p] < 0.0 || std::isnan(values[p]))
        throw std::invalid_argument("PositiveMatrix: negative entry");
      m.log_[p] = values[p] == 0.0 ? log_zero : std::log(values[p]);
    }
    return m;
  }

  static PositiveMatrix uniform(int n) {
    return PositiveMatrix(n, -std::log(static_cast<double>(n)));
  }

  int n() const { return n_; }
  std::size_t size() const { return log_.size(); }

  double& log_at(int i, int j) { return log_[idx(i, j)]; }
  double log_at(int i, int j) const { return log_[idx(i, j)]; }
  double value(int i, int j) const { return std::exp(log_[idx(i, j)]); }

  std::vector<double>& logs() { return log_; }
  const std::vector<double>& logs() const { return log_; }

  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i) * n_ + j;
  }

  // False iff some entry is zero (-inf) or non-finite.
  bool strictly_positive() const {
    for (double lv : log_)
      if (!std::isfinite(lv)) return false;
    return true;
  }

 private:
  static int check_dim(int n) {
    if (n < 1) throw std::invalid_argument("PositiveMatrix: n must be >= 1");
    return n;
  }

  int n_;
  std::vector<double> log_;
};

// Dense n^4 tensor in log space, laid out so each (i,j) block is a
// contiguous n^2 slab of (k,l) entries. Masked entries are pinned to -inf
// and never participate in sums, objectives or normalizations.
class LiftedTensor {
 public:
  LiftedTensor(MaskPtr mask, double log_value = 0.0)
      : n_(check(mask)),
        mask_(std::move(mask)),
        log_(pow4(n_), log_value) {
    apply_mask();
  }

  static LiftedTensor from_values(MaskPtr mask, const std::vector<double>& values) {
    LiftedTensor t(std::move(mask));
    if (values.size() != t.log_.size())
      throw std::invalid_argument("LiftedTensor: value count != n^4");
    for (int i = 0; i < t.n_; ++i)
      for (int j = 0; j < t.n_; ++j)
        for (int k = 0; k < t.n_; ++k)
          for (int l = 0; l < t.n_; ++l) {
            const double v = values[t.idx(i, j, k, l)];
            if (v < 0.0 || std::isnan(v))
              throw std::invalid_argument("LiftedTensor: negative entry");
            if (t.mask_->is_masked(i, j, k, l)) {
              if (v != 0.0)
                throw std::invalid_argument("LiftedTensor: nonzero masked entry");
              t.log_[t.idx(i, j, k, l)] = log_zero;
            } else {
              t.log_[t.idx(i, j, k, l)] = v == 0.0 ? log_zero : std::log(v);
            }
          }
    return t;
  }

  static LiftedTensor uniform(MaskPtr mask) {
    const int n = mask->n();
    return LiftedTensor(std::move(mask), -2.0 * std::log(static_cast<double>(n)));
  }

  int n() const { return n_; }
  std::size_t size() const { return log_.size(); }
  const MaskPtr& mask() const { return mask_; }

  double& log_at(int i, int j, int k, int l) { return log_[idx(i, j, k, l)]; }
  double log_at(int i, int j, int k, int l) const { return log_[idx(i, j, k, l)]; }
  double value(int i, int j, int k, int l) const {
    return std::exp(log_[idx(i, j, k, l)]);
  }

  std::vector<double>& logs() { return log_; }
  const std::vector<double>& logs() const { return log_; }

  std::size_t idx(int i, int j, int k, int l) const {
    return ((static_cast<std::size_t>(i) * n_ + j) * n_ + k) * n_ + l;
  }

  bool strictly_positive_off_mask() const {
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        for (int k = 0; k < n_; ++k)
          for (int l = 0; l < n_; ++l) {
            const double lv = log_[idx(i, j, k, l)];
            if (mask_->is_masked(i, j, k, l)) {
              if (!is_log_zero(lv)) return false;
            } else if (!std::isfinite(lv)) {
              return false;
            }
          }
    return true;
  }

 private:
  static int check(const MaskPtr& mask) {
    if (!mask) throw std::invalid_argument("LiftedTensor: null mask");
    return mask->n();
  }
  static std::size_t pow4(int n) {
    const std::size_t m = static_cast<std::size_t>(n) * n;
    return m * m;
  }
  void apply_mask() {
    if (!mask_->enabled()) return;
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        for (int k = 0; k < n_; ++k)
          for (int l = 0; l < n_; ++l)
            if (mask_->is_masked(i, j, k, l)) log_[idx(i, j, k, l)] = log_zero;
  }

  int n_;
  MaskPtr mask_;
  std::vector<double> log_;
};

// y_diamond[i,j,k,l] = y[k,l,i,j]. The gangster set is invariant under the
// swap, so the result shares the mask.
inline LiftedTensor diamond(const LiftedTensor& y) {
  const int n = y.n();
  LiftedTensor out(y.mask());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          out.log_at(i, j, k, l) = y.log_at(k, l, i, j);
  return out;
}

// Paired (x, y) point of the lifted program; x and y share n and mask.
struct LiftedPoint {
  PositiveMatrix x;
  LiftedTensor y;

  LiftedPoint(PositiveMatrix x_in, LiftedTensor y_in)
      : x(std::move(x_in)), y(std::move(y_in)) {
    if (x.n() != y.n())
      throw std::invalid_argument("LiftedPoint: dimension mismatch");
  }

  int n() const { return x.n(); }
  const MaskPtr& mask() const { return y.mask(); }

  // All-ones point (1, 1); the reference measure of the outer schemes.
  static LiftedPoint ones(MaskPtr mask) {
    const int n = mask->n();
    return LiftedPoint(PositiveMatrix(n, 0.0), LiftedTensor(std::move(mask)));
  }

  // x = 1/n, y = 1/n^2; strictly feasible when the mask is disabled.
  static LiftedPoint uniform(MaskPtr mask) {
    const int n = mask->n();
    return LiftedPoint(PositiveMatrix::uniform(n), LiftedTensor::uniform(std::move(mask)));
  }

  // Barycenter of all lifted permutations: strictly feasible off the mask
  // for every n, including with gangster constraints.
  static LiftedPoint barycenter(MaskPtr mask) {
    const int n = mask->n();
    LiftedPoint p = uniform(mask);
    const double diag = -std::log(static_cast<double>(n));
    const double off =
        n > 1 ? -std::log(static_cast<double>(n) * (n - 1)) : diag;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            double& lv = p.y.log_at(i, j, k, l);
            if (p.y.mask()->is_masked(i, j, k, l))
              lv = log_zero;
            else if (i == k && j == l)
              lv = diag;
            else if (i != k && j != l)
              lv = off;
          }
    return p;
  }
};

// (x, y) -> (x^T, y^T) with y^T[i,j,k,l] = y[j,i,l,k].
inline LiftedPoint transpose_pair(const LiftedPoint& p) {
  const int n = p.n();
  PositiveMatrix xt(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) xt.log_at(i, j) = p.x.log_at(j, i);
  LiftedTensor yt(p.y.mask());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          yt.log_at(i, j, k, l) = p.y.log_at(j, i, l, k);
  return LiftedPoint(std::move(xt), std::move(yt));
}

// Elementwise product computed as a sum of logs; masked entries stay zero
// (-inf absorbs). This is how products of many feasible points are
// accumulated without underflow.
inline LiftedPoint hadamard_log(const LiftedPoint& a, const LiftedPoint& b) {
  if (a.n() != b.n() || !(*a.mask() == *b.mask()))
    throw std::invalid_argument("hadamard_log: shape or mask mismatch");
  LiftedPoint out = a;
  for (std::size_t p = 0; p < out.x.logs().size(); ++p)
    out.x.logs()[p] += b.x.logs()[p];
  for (std::size_t p = 0; p < out.y.logs().size(); ++p)
    out.y.logs()[p] += b.y.logs()[p];
  return out;
}

}  // namespace sinkja

#endif
