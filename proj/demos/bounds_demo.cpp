// Minimal library walkthrough: build a small flow/distance instance, solve
// the lifted relaxation, and print the bound sandwich.
#include <cstdio>

#include "sinkja/sinkja.hpp"

int main() {
  using namespace sinkja;

  // A 5-facility instance: flows on a path graph, distances on a cycle.
  const int n = 5;
  std::vector<double> flow(n * n, 0.0), dist(n * n, 0.0);
  for (int i = 0; i + 1 < n; ++i) flow[i * n + i + 1] = flow[(i + 1) * n + i] = 10 - i;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int ring = std::min((i - j + n) % n, (j - i + n) % n);
      if (i != j) dist[i * n + j] = ring * 3;
    }
  const auto inst = QapInstance::koopmans_beckmann(n, flow, dist, "demo5");

  OuterConfig cfg;          // accumulation scheme, beta0 = 1
  cfg.eps_outer = 1e-4;
  cfg.inner.eps_inner = 1e-4;
  cfg.inner.max_cycles = 5000;

  const auto rep = solve(inst, cfg);
  std::printf("lower bound    : %.4f\n", rep.lower);
  std::printf("upper bound    : %.4f\n", rep.upper);
  std::printf("permutation    :");
  for (int v : rep.perm.perm) std::printf(" %d", v + 1);
  std::printf("\nnormalized gap : %.2e\n", rep.normalized_gap);

  const auto [opt_perm, opt] = brute_force(inst);
  std::printf("true optimum   : %.4f (exhaustive)\n", opt);
  return 0;
}
