#pragma once

// Test problems (gravity surveying, Baart, parallel-beam tomography), row
// orderings and the white Gaussian noise model.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kaczmarz/errors.hpp"
#include "kaczmarz/linalg.hpp"
#include "kaczmarz/rng.hpp"

namespace kaczmarz {

/// Dense O(n^3) routines are only run up to this size.
inline constexpr std::size_t kMaxDimension = 4096;

struct TestProblem {
  DenseMatrix A;
  Vector x_bar;  // ground truth
  Vector b_bar;  // A * x_bar
  std::string name;
  std::map<std::string, double> params;
  // Original ray index of every kept row (tomography drops rays that miss the
  // grid). Empty when no rows were dropped.
  std::vector<std::size_t> row_origin;

  std::size_t m() const noexcept { return A.rows(); }
  std::size_t n() const noexcept { return A.cols(); }
};

struct NoiseModel {
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

struct RowOrdering {
  std::vector<std::size_t> perm;  // new row i is old row perm[i]
  std::string label;
};

namespace detail {

inline void check_size(std::size_t n, const char* what) {
  if (n > kMaxDimension)
    throw InvalidArgument(std::string(what) + ": dimension exceeds " +
                          std::to_string(kMaxDimension));
}

inline void check_no_zero_rows(const DenseMatrix& a, const char* what) {
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto r = a.row(i);
    if (std::all_of(r.begin(), r.end(), [](double v) { return v == 0.0; }))
      throw InvalidArgument(std::string(what) + ": zero row " + std::to_string(i));
  }
}

// cos/sin of an angle in degrees, exact at multiples of 90.
inline std::pair<double, double> cos_sin_deg(double deg) {
  const double q = deg / 90.0;
  if (q == std::floor(q)) {
    const auto k = static_cast<long long>(q) % 4;
    switch ((k + 4) % 4) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, -1.0};
    }
  }
  const double rad = deg * std::numbers::pi / 180.0;
  return {std::cos(rad), std::sin(rad)};
}

}  // namespace detail

/// 1D gravity surveying: midpoint quadrature of K(s,t) = d (d^2 + (s-t)^2)^(-3/2)
/// on [0,1]^2 with x(t) = sin(pi t) + 0.5 sin(2 pi t).
inline TestProblem gravity(std::size_t n, double d) {
  if (n < 2) throw InvalidArgument("gravity: n must be at least 2");
  if (!(d > 0.0)) throw InvalidArgument("gravity: depth d must be positive");
  detail::check_size(n, "gravity");
  const double h = 1.0 / static_cast<double>(n);
  TestProblem p;
  p.name = "gravity";
  p.params = {{"n", static_cast<double>(n)}, {"d", d}};
  p.A = DenseMatrix(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double dist = (static_cast<double>(i) - static_cast<double>(j)) * h;
      p.A(i, j) = h * d / std::pow(d * d + dist * dist, 1.5);
    }
  p.x_bar.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double t = (static_cast<double>(j) + 0.5) * h;
    p.x_bar[j] = std::sin(std::numbers::pi * t) + 0.5 * std::sin(2.0 * std::numbers::pi * t);
  }
  p.b_bar = matvec(p.A, p.x_bar);
  return p;
}

/// Baart's first-kind Fredholm equation, kernel exp(s cos t), s in [0, pi/2],
/// t in [0, pi], discretized by Galerkin with box functions (Simpson rule in t),
/// following the Regularization Tools construction. x(t) = sin t.
inline TestProblem baart(std::size_t n) {
  if (n < 4 || n % 2 != 0) throw InvalidArgument("baart: n must be even and at least 4");
  detail::check_size(n, "baart");
  const double pi = std::numbers::pi;
  const double hs = pi / (2.0 * static_cast<double>(n));
  const double ht = pi / static_cast<double>(n);
  const double c = 1.0 / (3.0 * std::sqrt(2.0));
  const std::size_t nh = n / 2;

  auto cell_integrals = [&](double co) {
    Vector f(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double s0 = static_cast<double>(i) * hs, s1 = static_cast<double>(i + 1) * hs;
      f[i] = (std::exp(s1 * co) - std::exp(s0 * co)) / co;
    }
    return f;
  };

  TestProblem p;
  p.name = "baart";
  p.params = {{"n", static_cast<double>(n)}};
  p.A = DenseMatrix(n, n);
  Vector f3 = cell_integrals(1.0);
  for (std::size_t j = 1; j <= n; ++j) {
    const Vector f1 = f3;
    const Vector f2 = cell_integrals(std::cos((static_cast<double>(j) - 0.5) * ht));
    if (j == nh) {
      f3.assign(n, hs);  // limit of the cell integral as cos(j ht) -> 0
    } else {
      f3 = cell_integrals(std::cos(static_cast<double>(j) * ht));
    }
    for (std::size_t i = 0; i < n; ++i) p.A(i, j - 1) = c * (f1[i] + 4.0 * f2[i] + f3[i]);
  }
  p.x_bar.resize(n);
  for (std::size_t j = 0; j < n; ++j)
    p.x_bar[j] = (std::cos(static_cast<double>(j) * ht) - std::cos(static_cast<double>(j + 1) * ht)) /
                 std::sqrt(ht);
  p.b_bar = matvec(p.A, p.x_bar);
  return p;
}

/// Modified Shepp-Logan phantom sampled at the centres of an N x N pixel grid.
/// Pixel (row r from the top, column c from the left) has index r * N + c.
inline Vector shepp_logan(std::size_t N) {
  struct Ellipse {
    double value, a, b, x0, y0, phi_deg;
  };
  static constexpr std::array<Ellipse, 10> ellipses{{
      {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
      {-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0},
      {-0.2, 0.1100, 0.3100, 0.22, 0.0, -18.0},
      {-0.2, 0.1600, 0.4100, -0.22, 0.0, 18.0},
      {0.1, 0.2100, 0.2500, 0.0, 0.35, 0.0},
      {0.1, 0.0460, 0.0460, 0.0, 0.1, 0.0},
      {0.1, 0.0460, 0.0460, 0.0, -0.1, 0.0},
      {0.1, 0.0460, 0.0230, -0.08, -0.605, 0.0},
      {0.1, 0.0230, 0.0230, 0.0, -0.606, 0.0},
      {0.1, 0.0230, 0.0460, 0.06, -0.605, 0.0},
  }};
  const double half = static_cast<double>(N) / 2.0;
  Vector img(N * N, 0.0);
  for (std::size_t r = 0; r < N; ++r)
    for (std::size_t c = 0; c < N; ++c) {
      const double x = (static_cast<double>(c) + 0.5 - half) / half;
      const double y = (half - static_cast<double>(r) - 0.5) / half;
      double v = 0.0;
      for (const auto& e : ellipses) {
        const auto [co, si] = detail::cos_sin_deg(e.phi_deg);
        const double u = (x - e.x0) * co + (y - e.y0) * si;
        const double w = -(x - e.x0) * si + (y - e.y0) * co;
        if (u * u / (e.a * e.a) + w * w / (e.b * e.b) <= 1.0) v += e.value;
      }
      img[r * N + c] = v;
    }
  return img;
}

struct ParallelTomoOptions {
  std::size_t N = 32;
  std::size_t n_angles = 32;
  std::size_t rays_per_angle = 32;
  // Distance between the first and last ray; rays_per_angle - 1 (unit ray
  // spacing) when not set.
  std::optional<double> detector_width;
};

/// Parallel-beam tomography on an N x N unit-pixel grid centred at the origin.
/// Angles k * 180 / n_angles degrees; rays ordered angle-major. Row entries are
/// exact ray/pixel intersection lengths. Rays that miss the grid are dropped
/// and recorded in row_origin.
inline TestProblem paralleltomo(const ParallelTomoOptions& opt) {
  const std::size_t N = opt.N, na = opt.n_angles, p = opt.rays_per_angle;
  if (N < 2) throw InvalidArgument("paralleltomo: N must be at least 2");
  if (na < 1 || p < 1) throw InvalidArgument("paralleltomo: need at least one angle and ray");
  detail::check_size(N * N, "paralleltomo");
  detail::check_size(na * p, "paralleltomo");
  const double width = opt.detector_width.value_or(static_cast<double>(p) - 1.0);
  if (!(width >= 0.0)) throw InvalidArgument("paralleltomo: detector width must be nonnegative");

  const double half = static_cast<double>(N) / 2.0;
  const std::size_t n = N * N;
  std::vector<double> rows;
  std::vector<std::size_t> origin;
  std::vector<double> ts;
  std::vector<double> row(n);

  for (std::size_t k = 0; k < na; ++k) {
    const double theta = static_cast<double>(k) * 180.0 / static_cast<double>(na);
    const auto [co, si] = detail::cos_sin_deg(theta);
    const double dx = -si, dy = co;
    for (std::size_t j = 0; j < p; ++j) {
      const double offset =
          p == 1 ? 0.0 : -width / 2.0 + width * static_cast<double>(j) / static_cast<double>(p - 1);
      const double px = co * offset, py = si * offset;
      ts.clear();
      for (std::size_t g = 0; g <= N; ++g) {
        const double line = static_cast<double>(g) - half;
        if (dx != 0.0) ts.push_back((line - px) / dx);
        if (dy != 0.0) ts.push_back((line - py) / dy);
      }
      std::sort(ts.begin(), ts.end());
      std::fill(row.begin(), row.end(), 0.0);
      bool hit = false;
      for (std::size_t q = 0; q + 1 < ts.size(); ++q) {
        const double len = ts[q + 1] - ts[q];
        if (len <= 1e-10) continue;
        const double tm = 0.5 * (ts[q] + ts[q + 1]);
        const double xm = px + tm * dx, ym = py + tm * dy;
        if (!(xm > -half && xm < half && ym > -half && ym < half)) continue;
        const auto c = std::min(N - 1, static_cast<std::size_t>(std::floor(xm + half)));
        const auto rb = std::min(N - 1, static_cast<std::size_t>(std::floor(ym + half)));
        const std::size_t r = N - 1 - rb;
        row[r * N + c] += len;
        hit = true;
      }
      if (!hit) continue;
      rows.insert(rows.end(), row.begin(), row.end());
      origin.push_back(k * p + j);
    }
  }
  if (origin.empty()) throw InvalidArgument("paralleltomo: no ray intersects the grid");

  TestProblem prob;
  prob.name = "paralleltomo";
  prob.params = {{"N", static_cast<double>(N)},
                 {"n_angles", static_cast<double>(na)},
                 {"rays_per_angle", static_cast<double>(p)},
                 {"detector_width", width}};
  prob.A = DenseMatrix(origin.size(), n, std::move(rows));
  if (origin.size() != na * p) prob.row_origin = std::move(origin);
  prob.x_bar = shepp_logan(N);
  prob.b_bar = matvec(prob.A, prob.x_bar);
  return prob;
}

inline TestProblem paralleltomo(std::size_t N, std::size_t n_angles, std::size_t rays_per_angle) {
  return paralleltomo(ParallelTomoOptions{N, n_angles, rays_per_angle, std::nullopt});
}

// ---------------------------------------------------------------------------
// Orderings and noise

inline bool is_permutation_of_range(const std::vector<std::size_t>& perm) {
  std::vector<char> seen(perm.size(), 0);
  for (auto v : perm) {
    if (v >= perm.size() || seen[v]) return false;
    seen[v] = 1;
  }
  return true;
}

inline RowOrdering identity_ordering(std::size_t m) {
  RowOrdering o;
  o.perm.resize(m);
  std::iota(o.perm.begin(), o.perm.end(), std::size_t{0});
  o.label = "default";
  return o;
}

/// Uniform random permutation of 0..m-1 from Xoshiro256(seed).
inline RowOrdering random_ordering(std::size_t m, std::uint64_t seed) {
  if (m < 1) throw InvalidArgument("random_ordering: m must be at least 1");
  Xoshiro256 rng(seed);
  return {random_permutation(m, rng), "random(seed=" + std::to_string(seed) + ")"};
}

inline RowOrdering inverse_ordering(const RowOrdering& o) {
  RowOrdering inv;
  inv.perm.resize(o.perm.size());
  for (std::size_t i = 0; i < o.perm.size(); ++i) inv.perm[o.perm[i]] = i;
  inv.label = "inverse(" + o.label + ")";
  return inv;
}

/// Permutes the rows of A and the entries of b_bar identically; x_bar unchanged.
inline TestProblem apply_ordering(const TestProblem& p, const RowOrdering& o) {
  if (o.perm.size() != p.m()) throw InvalidArgument("apply_ordering: permutation length mismatch");
  if (!is_permutation_of_range(o.perm)) throw InvalidArgument("apply_ordering: not a permutation");
  TestProblem q = p;
  for (std::size_t i = 0; i < p.m(); ++i) {
    const auto src = p.A.row(o.perm[i]);
    std::copy(src.begin(), src.end(), q.A.row(i).begin());
    q.b_bar[i] = p.b_bar[o.perm[i]];
  }
  if (!p.row_origin.empty())
    for (std::size_t i = 0; i < p.m(); ++i) q.row_origin[i] = p.row_origin[o.perm[i]];
  return q;
}

/// b = b_bar + e, e ~ N(0, sigma^2 I) drawn from Xoshiro256(seed).
inline Vector add_noise(std::span<const double> b_bar, const NoiseModel& nm) {
  if (!(nm.sigma >= 0.0)) throw InvalidArgument("add_noise: sigma must be nonnegative");
  Vector b(b_bar.begin(), b_bar.end());
  if (nm.sigma == 0.0) return b;
  Xoshiro256 rng(nm.seed);
  for (auto& v : b) v += nm.sigma * rng.gaussian();
  return b;
}

/// Pure noise vector e ~ N(0, sigma^2 I) of length m.
inline Vector gaussian_noise(std::size_t m, const NoiseModel& nm) {
  return add_noise(Vector(m, 0.0), nm);
}

}  // namespace kaczmarz
