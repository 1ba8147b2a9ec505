#pragma once

// Noise propagation: splitting the reconstruction error, the xi coefficients
// of the noise in the eigenbasis, expected noise-error norms and their Monte
// Carlo validation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "kaczmarz/errors.hpp"
#include "kaczmarz/linalg.hpp"
#include "kaczmarz/operator.hpp"
#include "kaczmarz/problems.hpp"
#include "kaczmarz/rng.hpp"
#include "kaczmarz/solvers.hpp"
#include "kaczmarz/spectral.hpp"

namespace kaczmarz {

/// Per sweep k = 0..k_max:
///   recon = ||x_k - x_bar||, iter = ||xbar_k - x_bar||, noise = ||x_k - xbar_k||,
/// where xbar_k are the iterates for noise-free data.
struct ErrorSplit {
  Vector recon_err;
  Vector iter_err;
  Vector noise_err;
};

inline ErrorSplit error_split(const TestProblem& p, std::span<const double> b_noisy,
                              const SweepConfig& cfg, std::size_t k_max) {
  if (b_noisy.size() != p.m()) throw InvalidArgument("error_split: data has wrong length");
  SweepIterator noisy(p.A, b_noisy, cfg);
  SweepIterator clean(p.A, p.b_bar, cfg);
  ErrorSplit s;
  auto push = [&] {
    s.recon_err.push_back(norm2(subtract(noisy.x(), p.x_bar)));
    s.iter_err.push_back(norm2(subtract(clean.x(), p.x_bar)));
    s.noise_err.push_back(norm2(subtract(noisy.x(), clean.x())));
  };
  push();
  for (std::size_t k = 0; k < k_max; ++k) {
    noisy.step();
    clean.step();
    push();
  }
  return s;
}

/// The same split for CGLS iterates.
inline ErrorSplit error_split_cgls(const TestProblem& p, std::span<const double> b_noisy,
                                   std::size_t k_max) {
  const IterationHistory hn = cgls(p.A, b_noisy, k_max);
  const IterationHistory hc = cgls(p.A, p.b_bar, k_max);
  const std::size_t len = std::min(hn.iterates.size(), hc.iterates.size());
  ErrorSplit s;
  for (std::size_t k = 0; k < len; ++k) {
    s.recon_err.push_back(norm2(subtract(hn.iterates[k], p.x_bar)));
    s.iter_err.push_back(norm2(subtract(hc.iterates[k], p.x_bar)));
    s.noise_err.push_back(norm2(subtract(hn.iterates[k], hc.iterates[k])));
  }
  return s;
}

/// argmin_k recon_err, first index on ties.
inline std::size_t semiconvergence_min(const ErrorSplit& s) {
  if (s.recon_err.size() < 2) throw InvalidArgument("semiconvergence_min: need at least 2 sweeps");
  return static_cast<std::size_t>(std::min_element(s.recon_err.begin(), s.recon_err.end()) -
                                  s.recon_err.begin());
}

// ---------------------------------------------------------------------------

struct XiProfile {
  ComplexVector xi;         // W^-1 A# e
  ComplexVector lambda;     // eigenvalues paired with xi
  std::vector<std::size_t> ks;
  std::vector<Vector> factor;  // factor[t][i] = |1 - lambda_i^k_t|^2
  std::vector<Vector> term;    // term[t][i] = factor * |xi_i|^2
  Vector norm_sq;              // ||xi^k||^2 = sum_i term[t][i]
};

inline XiProfile xi_profile(const SharpMaps& sm, std::span<const double> e,
                            std::span<const std::size_t> ks) {
  if (!(sm.kappa() <= kNearDefectiveKappa))
    throw NumericalError("xi_profile: eigenvector matrix is near-defective (kappa = " +
                         format_real(sm.kappa()) + ")");
  XiProfile xp;
  xp.xi = sm.xi(e);
  xp.lambda = sm.eigenvalues();
  xp.ks.assign(ks.begin(), ks.end());
  for (std::size_t k : ks) {
    Vector f(xp.xi.size()), t(xp.xi.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < xp.xi.size(); ++i) {
      f[i] = std::norm(1.0 - std::pow(xp.lambda[i], static_cast<int>(k)));
      t[i] = f[i] * std::norm(xp.xi[i]);
      sum += t[i];
    }
    xp.factor.push_back(std::move(f));
    xp.term.push_back(std::move(t));
    xp.norm_sq.push_back(sum);
  }
  return xp;
}

// ---------------------------------------------------------------------------

struct ExpectationReport {
  std::vector<std::size_t> ks;
  Vector E1;  // sigma^2 ||A_k#||_F^2
  Vector E2;  // sum_i |1 - lambda_i^k|^2 E|xi_i|^2
  Vector mc_estimate;
  Vector mc_stderr;
  Vector E1_stderr;  // nonzero only when E1 itself is estimated
  bool E1_estimated = false;
};

struct ExpectationOptions {
  std::size_t n_mc = 25;
  std::uint64_t seed = 0;
  std::size_t explicit_limit = 512;  // above this n, E1 uses a randomized trace
  std::size_t trace_probes = 200;
  SweepVariant variant = SweepVariant::standard;  // must match the SharpMaps kind
};

namespace detail {

inline double row_norm_sq(const ComplexMatrix& m, std::size_t row) {
  double s = 0.0;
  for (std::size_t j = 0; j < m.cols(); ++j) s += std::norm(m(row, j));
  return s;
}

struct MeanStd {
  double mean = 0.0, stderr_ = 0.0;
};

inline MeanStd mean_stderr(const Vector& v) {
  MeanStd r;
  if (v.empty()) return r;
  double s = 0.0;
  for (double x : v) s += x;
  r.mean = s / static_cast<double>(v.size());
  if (v.size() > 1) {
    double q = 0.0;
    for (double x : v) q += (x - r.mean) * (x - r.mean);
    r.stderr_ = std::sqrt(q / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  }
  return r;
}

}  // namespace detail

/// E1 is sigma^2 ||C Phi_k Xi||_F^2 (V has orthonormal columns, so this equals
/// ||W Phi_k W^-1 A#||_F^2). E|xi_i|^2 = sigma^2 ||row i of Xi||^2 by covariance
/// propagation. The Monte Carlo estimate runs k actual sweeps on pure-noise
/// data e from x0 = 0, which yields A_k# e without using the eigenbasis.
inline ExpectationReport expected_norms(const DenseMatrix& a, const SharpMaps& sm, double sigma,
                                        std::span<const std::size_t> ks,
                                        const ExpectationOptions& opt = {}) {
  if (sigma < 0.0) throw InvalidArgument("expected_norms: sigma must be nonnegative");
  if (opt.n_mc < 2) throw InvalidArgument("expected_norms: need at least 2 Monte Carlo draws");
  if (!std::is_sorted(ks.begin(), ks.end())) throw InvalidArgument("expected_norms: ks must be ascending");
  const std::size_t r = sm.rank(), m = sm.m();
  const ComplexVector& lambda = sm.eigenvalues();
  const ComplexMatrix& Xi = sm.Xi();
  const double s2 = sigma * sigma;

  ExpectationReport rep;
  rep.ks.assign(ks.begin(), ks.end());
  Vector xi_var(r);
  for (std::size_t i = 0; i < r; ++i) xi_var[i] = s2 * detail::row_norm_sq(Xi, i);

  rep.E1_estimated = sm.n() > opt.explicit_limit;
  for (std::size_t k : ks) {
    ComplexVector phi(r);
    for (std::size_t i = 0; i < r; ++i) phi[i] = 1.0 - std::pow(lambda[i], static_cast<int>(k));
    double e2 = 0.0;
    for (std::size_t i = 0; i < r; ++i) e2 += std::norm(phi[i]) * xi_var[i];
    rep.E2.push_back(e2);

    if (!rep.E1_estimated) {
      ComplexMatrix pxi = Xi;
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < m; ++j) pxi(i, j) *= phi[i];
      rep.E1.push_back(s2 * std::pow(frobenius_norm(matmul(sm.C(), pxi)), 2));
      rep.E1_stderr.push_back(0.0);
    } else {
      Xoshiro256 rng(substream_seed(opt.seed ^ 0x7472616365ULL, k));
      Vector samples;
      for (std::size_t t = 0; t < opt.trace_probes; ++t) {
        Vector z(m);
        for (auto& v : z) v = rng.uniform() < 0.5 ? -1.0 : 1.0;
        const Vector y = sm.apply_Ak_sharp(z, k);
        samples.push_back(s2 * dot(y, y));
      }
      const auto ms = detail::mean_stderr(samples);
      rep.E1.push_back(ms.mean);
      rep.E1_stderr.push_back(ms.stderr_);
    }
  }

  // Monte Carlo: realization j uses its own substream of the master seed.
  std::vector<Vector> samples(ks.size());
  SweepConfig cfg;
  cfg.omega = sm.restricted().omega;
  cfg.variant = opt.variant;
  cfg.max_sweeps = ks.empty() ? 0 : ks.back();
  for (std::size_t j = 0; j < opt.n_mc; ++j) {
    const Vector e = gaussian_noise(m, NoiseModel{sigma, substream_seed(opt.seed, j)});
    SweepIterator it(a, e, cfg);
    std::size_t t = 0;
    while (t < ks.size() && ks[t] == 0) samples[t++].push_back(0.0);
    while (t < ks.size()) {
      it.step();
      while (t < ks.size() && ks[t] == it.sweeps()) samples[t++].push_back(dot(it.x(), it.x()));
    }
  }
  for (const auto& s : samples) {
    const auto ms = detail::mean_stderr(s);
    rep.mc_estimate.push_back(ms.mean);
    rep.mc_stderr.push_back(ms.stderr_);
  }
  return rep;
}

// ---------------------------------------------------------------------------

struct MonotonicityReport {
  std::vector<std::size_t> ks;
  Vector E2;                          // with every E|xi_i|^2 = 1
  std::vector<std::size_t> bumps;     // per eigenvalue: decreases of |1 - lambda^k| along ks
  std::size_t nonmonotone_factors = 0;
  bool E2_monotone = true;
};

inline MonotonicityReport monotonicity_probe(const ComplexVector& lambda,
                                             std::span<const std::size_t> ks) {
  MonotonicityReport rep;
  rep.ks.assign(ks.begin(), ks.end());
  rep.bumps.assign(lambda.size(), 0);
  Vector prev(lambda.size(), -1.0);
  for (std::size_t t = 0; t < ks.size(); ++t) {
    double e2 = 0.0;
    for (std::size_t i = 0; i < lambda.size(); ++i) {
      const double f = std::abs(1.0 - std::pow(lambda[i], static_cast<int>(ks[t])));
      if (t > 0 && f < prev[i]) ++rep.bumps[i];
      prev[i] = f;
      e2 += f * f;
    }
    if (t > 0 && e2 < rep.E2.back()) rep.E2_monotone = false;
    rep.E2.push_back(e2);
  }
  rep.nonmonotone_factors = static_cast<std::size_t>(
      std::count_if(rep.bumps.begin(), rep.bumps.end(), [](std::size_t b) { return b > 0; }));
  return rep;
}

}  // namespace kaczmarz
