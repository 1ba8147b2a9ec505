#pragma once

// Row-action sweeps (standard, symmetric, randomized Kaczmarz) and CGLS.

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "kaczmarz/csv.hpp"
#include "kaczmarz/errors.hpp"
#include "kaczmarz/linalg.hpp"
#include "kaczmarz/problems.hpp"
#include "kaczmarz/rng.hpp"

namespace kaczmarz {

enum class SweepVariant { standard, symmetric, randomized };

inline std::string to_string(SweepVariant v) {
  switch (v) {
    case SweepVariant::standard: return "standard";
    case SweepVariant::symmetric: return "symmetric";
    case SweepVariant::randomized: return "randomized";
  }
  return "?";
}

inline SweepVariant parse_variant(const std::string& s) {
  if (s == "standard") return SweepVariant::standard;
  if (s == "symmetric") return SweepVariant::symmetric;
  if (s == "randomized") return SweepVariant::randomized;
  throw InvalidArgument("unknown sweep variant '" + s + "'");
}

struct SweepConfig {
  double omega = 1.0;
  SweepVariant variant = SweepVariant::standard;
  std::size_t max_sweeps = 100;
  std::uint64_t seed = 0;        // randomized variant only
  bool record_iterates = false;  // otherwise norms only
};

inline void validate(const SweepConfig& cfg) {
  if (!(cfg.omega > 0.0 && cfg.omega < 2.0))
    throw InvalidArgument("omega must lie in (0, 2), got " + format_real(cfg.omega));
}

struct IterationHistory {
  std::vector<Vector> iterates;  // empty unless recorded
  Vector residual_norms;
  Vector error_norms;  // empty unless a reference was supplied
  std::size_t sweep_count = 0;
  bool breakdown = false;  // CGLS only
};

/// Squared row norms, computed once per matrix and row ordering.
struct RowCache {
  Vector norms_sq;

  explicit RowCache(const DenseMatrix& a) : norms_sq(a.rows()) {
    for (std::size_t i = 0; i < a.rows(); ++i) {
      norms_sq[i] = dot(a.row(i), a.row(i));
      if (norms_sq[i] == 0.0) throw InvalidArgument("zero row " + std::to_string(i));
    }
  }
};

namespace detail {

inline void row_step(const DenseMatrix& a, std::span<const double> b, std::span<double> x,
                     std::size_t i, double omega, const RowCache& rc) {
  const auto ai = a.row(i);
  const double t = omega * (b[i] - dot(ai, x)) / rc.norms_sq[i];
  axpy(t, ai, x);
}

inline void check_dims(const DenseMatrix& a, std::span<const double> b, std::span<const double> x) {
  if (b.size() != a.rows() || x.size() != a.cols())
    throw InvalidArgument("sweep: dimension mismatch");
}

}  // namespace detail

/// Rows 1..m in storage order.
inline void sweep_standard_inplace(const DenseMatrix& a, std::span<const double> b,
                                   std::span<double> x, double omega, const RowCache& rc) {
  for (std::size_t i = 0; i < a.rows(); ++i) detail::row_step(a, b, x, i, omega, rc);
}

/// Rows 1..m, then m..1; rows m and 1 are each visited twice.
inline void sweep_symmetric_inplace(const DenseMatrix& a, std::span<const double> b,
                                    std::span<double> x, double omega, const RowCache& rc) {
  sweep_standard_inplace(a, b, x, omega, rc);
  for (std::size_t i = a.rows(); i-- > 0;) detail::row_step(a, b, x, i, omega, rc);
}

/// m row updates, indices drawn uniformly with replacement.
inline void sweep_randomized_inplace(const DenseMatrix& a, std::span<const double> b,
                                     std::span<double> x, double omega, const RowCache& rc,
                                     Xoshiro256& rng) {
  const std::size_t m = a.rows();
  for (std::size_t s = 0; s < m; ++s)
    detail::row_step(a, b, x, static_cast<std::size_t>(rng.bounded(m)), omega, rc);
}

inline Vector sweep_standard(const DenseMatrix& a, std::span<const double> b,
                             std::span<const double> x, double omega) {
  detail::check_dims(a, b, x);
  Vector y(x.begin(), x.end());
  sweep_standard_inplace(a, b, y, omega, RowCache(a));
  return y;
}

inline Vector sweep_symmetric(const DenseMatrix& a, std::span<const double> b,
                              std::span<const double> x, double omega) {
  detail::check_dims(a, b, x);
  Vector y(x.begin(), x.end());
  sweep_symmetric_inplace(a, b, y, omega, RowCache(a));
  return y;
}

inline Vector sweep_randomized(const DenseMatrix& a, std::span<const double> b,
                               std::span<const double> x, double omega, Xoshiro256& rng) {
  detail::check_dims(a, b, x);
  Vector y(x.begin(), x.end());
  sweep_randomized_inplace(a, b, y, omega, RowCache(a), rng);
  return y;
}

/// Stateful driver: x starts at 0 and advances one sweep per step().
class SweepIterator {
 public:
  SweepIterator(const DenseMatrix& a, std::span<const double> b, const SweepConfig& cfg)
      : a_(a), b_(b.begin(), b.end()), cfg_(cfg), cache_(a), rng_(cfg.seed), x_(a.cols(), 0.0) {
    validate(cfg);
    if (b.size() != a.rows()) throw InvalidArgument("sweep: dimension mismatch");
  }

  void step() {
    switch (cfg_.variant) {
      case SweepVariant::standard: sweep_standard_inplace(a_, b_, x_, cfg_.omega, cache_); break;
      case SweepVariant::symmetric: sweep_symmetric_inplace(a_, b_, x_, cfg_.omega, cache_); break;
      case SweepVariant::randomized:
        sweep_randomized_inplace(a_, b_, x_, cfg_.omega, cache_, rng_);
        break;
    }
    ++k_;
  }

  const Vector& x() const noexcept { return x_; }
  std::size_t sweeps() const noexcept { return k_; }

 private:
  const DenseMatrix& a_;
  Vector b_;
  SweepConfig cfg_;
  RowCache cache_;
  Xoshiro256 rng_;
  Vector x_;
  std::size_t k_ = 0;
};

namespace detail {

inline void record(IterationHistory& h, const DenseMatrix& a, std::span<const double> b,
                   std::span<const double> x, const std::optional<Vector>& ref, bool keep) {
  h.residual_norms.push_back(norm2(subtract(b, matvec(a, x))));
  if (ref) h.error_norms.push_back(norm2(subtract(x, *ref)));
  if (keep) h.iterates.emplace_back(x.begin(), x.end());
}

}  // namespace detail

/// max_sweeps sweeps from x0 = 0. Never stops early.
inline IterationHistory run(const DenseMatrix& a, std::span<const double> b, const SweepConfig& cfg,
                            const std::optional<Vector>& reference = std::nullopt) {
  if (reference && reference->size() != a.cols())
    throw InvalidArgument("run: reference has wrong length");
  SweepIterator it(a, b, cfg);
  IterationHistory h;
  detail::record(h, a, b, it.x(), reference, cfg.record_iterates);
  for (std::size_t k = 0; k < cfg.max_sweeps; ++k) {
    it.step();
    detail::record(h, a, b, it.x(), reference, cfg.record_iterates);
  }
  h.sweep_count = cfg.max_sweeps;
  return h;
}

inline IterationHistory run(const TestProblem& p, std::span<const double> b, const SweepConfig& cfg,
                            const std::optional<Vector>& reference = std::nullopt) {
  return run(p.A, b, cfg, reference);
}

/// CGLS on A^T A x = A^T b from x0 = 0. A zero search-direction image (A p = 0)
/// truncates the history and sets `breakdown`; an exactly zero normal-equation
/// residual ends the iteration normally.
inline IterationHistory cgls(const DenseMatrix& a, std::span<const double> b, std::size_t k_max,
                             const std::optional<Vector>& reference = std::nullopt,
                             bool record_iterates = true) {
  if (k_max < 1) throw InvalidArgument("cgls: k_max must be at least 1");
  if (b.size() != a.rows()) throw InvalidArgument("cgls: dimension mismatch");
  Vector x(a.cols(), 0.0);
  Vector r(b.begin(), b.end());
  Vector s = matvec_t(a, r);
  Vector p = s;
  double gamma = dot(s, s);

  IterationHistory h;
  detail::record(h, a, b, x, reference, record_iterates);
  for (std::size_t k = 0; k < k_max && gamma > 0.0; ++k) {
    const Vector q = matvec(a, p);
    const double delta = dot(q, q);
    if (delta == 0.0) {
      h.breakdown = true;
      break;
    }
    const double alpha = gamma / delta;
    axpy(alpha, p, x);
    axpy(-alpha, q, r);
    s = matvec_t(a, r);
    const double gamma_new = dot(s, s);
    for (std::size_t j = 0; j < p.size(); ++j) p[j] = s[j] + (gamma_new / gamma) * p[j];
    gamma = gamma_new;
    detail::record(h, a, b, x, reference, record_iterates);
    ++h.sweep_count;
  }
  return h;
}

/// Columns: sweep, residual_norm[, error_norm].
inline void write_history_csv(std::ostream& os, const IterationHistory& h) {
  const bool with_err = !h.error_norms.empty();
  std::vector<std::string> header{"sweep", "residual_norm"};
  if (with_err) header.emplace_back("error_norm");
  CsvWriter w(os, header);
  for (std::size_t k = 0; k < h.residual_norms.size(); ++k) {
    if (with_err)
      w.row(k, h.residual_norms[k], h.error_norms[k]);
    else
      w.row(k, h.residual_norms[k]);
  }
}

}  // namespace kaczmarz
