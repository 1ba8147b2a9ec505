// Builds a small gravity problem, runs Kaczmarz sweeps and inspects the
// spectrum of the iteration operator restricted to range(A^T).

#include <cstdio>

#include "kaczmarz/kaczmarz.hpp"

int main() {
  using namespace kaczmarz;

  const TestProblem p = gravity(64, 0.05);
  const SvdResult s = svd(p.A);

  SweepConfig cfg;
  cfg.omega = 1.0;
  cfg.max_sweeps = 50;
  const IterationHistory h = run(p, p.b_bar, cfg, p.x_bar);
  std::printf("relative error after %zu sweeps: %.3e\n", h.sweep_count,
              h.error_norms.back() / norm2(p.x_bar));

  const LFactor lf = build_L(p.A, cfg.omega);
  const SpectrumReport sr = spectrum(restrict_to_V(p.A, lf, s));
  std::printf("rho(G|_V) = %.10f, zero eigenvalues: %zu\n", sr.rho, sr.zero_count);

  const Vector x_inf = kaczmarz_limit(p.A, lf, s, p.b_bar);
  std::printf("||x_inf - x_bar|| / ||x_bar|| = %.3e\n", norm2(subtract(x_inf, p.x_bar)) / norm2(p.x_bar));
  return 0;
}
