// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance [--expected-fail 3,11] [--only 1,2,...]
//
// Exit status is nonzero when a criterion fails that is not listed in
// --expected-fail.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include "kaczmarz/kaczmarz.hpp"
#include "test_util.hpp"

using namespace kaczmarz;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [x]");
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

bool within_factor(double value, double target, double factor) {
  return value > 0.0 && value <= target * factor && value >= target / factor;
}

Vector row(const DenseMatrix& a, std::size_t i) { return Vector(a.row(i).begin(), a.row(i).end()); }

const TestProblem& tomo() {
  static const TestProblem p = paralleltomo(32, 32, 32);
  return p;
}

Outcome sweep_equivalence() {
  Outcome o;
  Xoshiro256 rng(2024);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const std::size_t m = 1 + rng.bounded(50), n = 1 + rng.bounded(40);
    const DenseMatrix a = testutil::random_matrix(m, n, 100 + t);
    const Vector b = testutil::random_vector(m, 200 + t), x = testutil::random_vector(n, 300 + t);
    for (double w : {0.3, 1.0, 1.7}) {
      const LFactor lf = build_L(a, w);
      const Vector explicit_form = add(x, matvec_t(a, solve_lower(lf.L, subtract(b, matvec(a, x)))));
      worst = std::max(worst, testutil::rel_diff(sweep_standard(a, b, x, w), explicit_form));
    }
  }
  o.check(worst <= 1e-10, "max relative difference " + fmt("%.2e", worst));
  return o;
}

Outcome zero_eigenvectors() {
  Outcome o;
  const std::vector<TestProblem> problems{gravity(128, 0.01), gravity(128, 0.02), gravity(128, 0.06), baart(32),
                                          tomo()};
  for (const auto& p : problems) {
    const LFactor lf = build_L(p.A, 1.0);
    const Vector a1 = row(p.A, 0), am = row(p.A, p.m() - 1);
    const double r1 = norm2(apply_G(lf, p.A, a1)) / norm2(a1);
    const double r2 = norm2(apply_Gt(lf, p.A, am)) / norm2(am);
    o.check(r1 <= 1e-12 && r2 <= 1e-12, p.name + " " + fmt("%.1e", std::max(r1, r2)));
  }
  return o;
}

const SpectrumReport& tomo_spectrum() {
  static const SpectrumReport sr = [] {
    const TestProblem& p = tomo();
    return spectrum(restrict_to_V(p.A, build_L(p.A, 1.0), svd(p.A)), 1e-8, false);
  }();
  return sr;
}

Outcome tomography_gap() {
  Outcome o;
  const double gap = 1.0 - tomo_spectrum().rho;
  o.check(within_factor(gap, 1.063e-7, 3.0), "1-rho = " + fmt("%.4e", gap) + " (target 1.063e-7 within x3)");
  return o;
}

Outcome tomography_zeros() {
  Outcome o;
  const std::size_t z = tomo_spectrum().zero_count;
  const std::size_t block = structural_orthogonality(tomo().A).leading_diag_block;
  o.check(z >= 20, "zero_count " + std::to_string(z));
  o.check(block >= 20, "leading block " + std::to_string(block));
  for (std::uint64_t seed : {1, 7, 42}) {
    const TestProblem q = apply_ordering(tomo(), random_ordering(tomo().m(), seed));
    const std::size_t zr = spectrum(restrict_to_V(q.A, build_L(q.A, 1.0), svd(q.A)), 1e-8, false).zero_count;
    o.check(zr < z, "random seed " + std::to_string(seed) + " zero_count " + std::to_string(zr));
  }
  return o;
}

Outcome gravity_numbers() {
  Outcome o;
  const double c1 = condition_number(gravity(128, 0.01).A), c2 = condition_number(gravity(128, 0.02).A);
  o.check(std::abs(c1 - 10.21) <= 0.05 * 10.21, "cond(d=0.01) " + fmt("%.4g", c1));
  o.check(std::abs(c2 - 415.7) <= 0.05 * 415.7, "cond(d=0.02) " + fmt("%.4g", c2));
  const TestProblem p = gravity(128, 0.01);
  const SvdResult s = svd(p.A);
  const LFactor lf = build_L(p.A, 1.0);
  const SymmetricRelations r =
      symmetric_relations(restrict_to_V(p.A, lf, s), restrict_to_V(p.A, lf, s, OperatorKind::symmetric));
  o.check(std::abs(r.rho_G - 0.92) <= 0.02, "rho(G) " + fmt("%.4f", r.rho_G));
  o.check(std::abs(r.rho_Gs - 0.85) <= 0.02, "rho(Gs) " + fmt("%.4f", r.rho_Gs));
  return o;
}

Outcome symmetric_identity() {
  Outcome o;
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    const std::size_t m = 4 + 3 * t, n = 30 - 2 * t;
    const DenseMatrix a = testutil::random_matrix(m, n, 500 + t);
    const SvdResult s = svd(a);
    const LFactor lf = build_L(a, 0.4 + 0.12 * t);
    const SymmetricRelations r =
        symmetric_relations(restrict_to_V(a, lf, s), restrict_to_V(a, lf, s, OperatorKind::symmetric));
    worst = std::max(worst, std::abs(r.difference));
  }
  o.check(worst <= 1e-8, "max |rho(Gs) - ||G||^2| " + fmt("%.2e", worst));
  const double alpha = norm_threshold_2x2(0.99, 0.98);
  o.check(std::abs(alpha - 0.0281) <= 0.0005, "2x2 threshold " + fmt("%.5f", alpha));
  return o;
}

Outcome bounds_example() {
  Outcome o;
  const TestProblem p = gravity(128, 0.02);
  const SvdResult s = svd(p.A);
  const LFactor lf = build_L(p.A, 1.0);
  const BoundsReport br = rho_bounds(p.A, s, lf, restrict_to_V(p.A, lf, s));
  o.check(within_factor(1 - br.rho_actual, 1e-4, 2), "1-rho " + fmt("%.3e", 1 - br.rho_actual));
  o.check(within_factor(1 - br.bound_L, 1e-5, 2), "1-bound_L " + fmt("%.3e", 1 - br.bound_L));
  o.check(within_factor(1 - br.bound_nu, 1e-5, 2), "1-bound_nu " + fmt("%.3e", 1 - br.bound_nu));
  o.check(within_factor(1 - br.norm_G, 9.9e-5, 2), "1-||G|| " + fmt("%.3e", 1 - br.norm_G));
  o.check(br.rho_actual <= br.norm_G && br.rho_actual <= br.bound_L && br.bound_L <= br.bound_nu, "ordering");
  return o;
}

Outcome omega_thresholds() {
  Outcome o;
  {
    const TestProblem p = gravity(128, 0.06);
    Vector grid;
    for (int i = 1; i <= 15; ++i) grid.push_back(0.02 * i);
    const ScanResult r = small_omega_scan(p.A, svd(p.A), grid);
    o.check(r.omega0 && std::abs(*r.omega0 - 0.08) <= 0.02 + 1e-12,
            "gravity omega0 " + (r.omega0 ? fmt("%.3f", *r.omega0) : std::string("none")));
  }
  {
    Vector grid;
    for (int i = 1; i <= 10; ++i) grid.push_back(0.001 * i);
    const ScanResult r = small_omega_scan(tomo().A, svd(tomo().A), grid);
    o.check(r.omega0 && std::abs(*r.omega0 - 0.004) <= 0.002 + 1e-12,
            "paralleltomo omega0 " + (r.omega0 ? fmt("%.3f", *r.omega0) : std::string("none")));
  }
  return o;
}

Outcome expected_values() {
  Outcome o;
  const std::vector<std::size_t> ks{1, 5, 20};
  const DenseMatrix rnd = testutil::random_matrix(20, 16, 7);
  const TestProblem g = gravity(32, 0.06);
  for (const auto& [name, a] : {std::pair<std::string, const DenseMatrix*>{"random 20x16", &rnd},
                                std::pair<std::string, const DenseMatrix*>{"gravity(32)", &g.A}}) {
    const SharpMaps sm(*a, build_L(*a, 1.0), svd(*a));
    const ExpectationReport r = expected_norms(*a, sm, 1.0, ks, {10000, 2024});
    double worst = 0.0;
    for (std::size_t t = 0; t < ks.size(); ++t)
      worst = std::max(worst, std::abs(r.mc_estimate[t] - r.E1[t]) / r.mc_stderr[t]);
    o.check(worst <= 3.0, name + " max deviation " + fmt("%.2f", worst) + " stderr");
  }
  return o;
}

Outcome semi_convergence() {
  Outcome o;
  const TestProblem p = gravity(128, 0.06);
  const SweepConfig cfg{1.0, SweepVariant::standard, 0};
  const std::size_t k_max = 300;
  std::size_t interior = 0;
  bool identical = true;
  Vector iter_ref;
  for (std::uint64_t r = 0; r < 25; ++r) {
    const ErrorSplit s = error_split(p, add_noise(p.b_bar, {5e-3, substream_seed(99, r)}), cfg, k_max);
    const std::size_t kmin = semiconvergence_min(s);
    if (kmin > 0 && kmin + 1 < s.recon_err.size()) ++interior;
    if (r == 0)
      iter_ref = s.iter_err;
    else
      identical = identical && s.iter_err == iter_ref;
  }
  o.check(interior == 25, std::to_string(interior) + "/25 interior minima");
  o.check(identical, "iteration error identical across realizations");
  const ErrorSplit c = error_split_cgls(p, add_noise(p.b_bar, {5e-3, 1}), 60);
  const std::size_t kc = semiconvergence_min(c);
  o.check(kc > 0 && kc + 1 < c.recon_err.size(), "CGLS minimum at k=" + std::to_string(kc));
  return o;
}

Outcome zero_plateau() {
  Outcome o;
  const TestProblem p = gravity(128, 0.01);
  const SvdResult s = svd(p.A);
  std::size_t missing = 0, total = 0;
  std::string first_missing;
  for (int i = 0; i <= 60; ++i) {
    const double w = 0.4 + 0.02 * i;
    ++total;
    if (scan_point(p.A, s, w, 1e-8).zero_count == 0) {
      if (missing++ == 0) first_missing = fmt("%.2f", w);
    }
  }
  o.check(missing == 0, std::to_string(total - missing) + "/" + std::to_string(total) +
                            " omegas with a zero eigenvalue" +
                            (missing ? ", first without at " + first_missing : std::string()));
  return o;
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(KACZMARZ_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Outcome determinism() {
  Outcome o;
  const char* commands[] = {
      "eigplot --n 64 --d 0.03",
      "errhist --n 64 --sweeps 50 --sigma 5e-3 --realizations 5 --methods standard,symmetric,randomized,cgls",
      "omegasweep --n 48 --omegas 0.1,0.5,1.0,1.5",
      "noisestats --n 32 --sigma 1e-3 --mc-samples 100",
      "bounds --n 64 --d 0.02 --bauer-fike",
      "structure --problem paralleltomo --N 16 --angles 16 --rays 16",
      "errhist --problem paralleltomo --N 16 --angles 16 --rays 16 --ordering random --variant randomized",
      "export --problem baart --n 32",
  };
  const fs::path root = fs::temp_directory_path() / "kaczmarz_acceptance_determinism";
  fs::remove_all(root);
  std::size_t files = 0, diffs = 0;
  int idx = 0;
  for (const char* c : commands) {
    const fs::path dir = root / std::to_string(idx++);
    fs::create_directories(dir);
    const int ra = run_cli(std::string(c) + " -o " + (dir / "a").string(), dir / "log_a");
    const int rb = run_cli(std::string(c) + " -o " + (dir / "b").string(), dir / "log_b");
    if (ra != 0 || rb != 0) {
      o.check(false, std::string("'") + c + "' exited with " + std::to_string(ra));
      continue;
    }
    for (const auto& e : fs::directory_iterator(dir / "a")) {
      if (e.path().extension() != ".csv") continue;
      ++files;
      if (slurp(e.path()) != slurp(dir / "b" / e.path().filename())) {
        ++diffs;
        o.check(false, std::string(c) + ": " + e.path().filename().string() + " differs");
      }
    }
  }
  o.check(files > 0 && diffs == 0, std::to_string(files) + " CSV files compared across " + std::to_string(idx) +
                                       " commands, " + std::to_string(diffs) + " differ");
  return o;
}

std::set<int> parse_list(const std::string& s) {
  std::set<int> out;
  std::stringstream ss(s);
  for (std::string tok; std::getline(ss, tok, ',');)
    if (!tok.empty()) out.insert(std::stoi(tok));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> expected_fail, only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--expected-fail" && i + 1 < argc)
      expected_fail = parse_list(argv[++i]);
    else if (arg == "--only" && i + 1 < argc)
      only = parse_list(argv[++i]);
    else {
      std::fprintf(stderr, "usage: acceptance [--expected-fail LIST] [--only LIST]\n");
      return 2;
    }
  }

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"sweep equals x + A^T L^-1 (b - Ax)", sweep_equivalence},
      {"zero eigenvectors a_1 of G and a_m of G^T", zero_eigenvectors},
      {"paralleltomo 1 - rho", tomography_gap},
      {"paralleltomo zero eigenvalues and diagonal block", tomography_zeros},
      {"gravity condition numbers and radii", gravity_numbers},
      {"rho(Gs) = ||G||^2 and 2x2 threshold", symmetric_identity},
      {"gravity(128, 0.02) bounds", bounds_example},
      {"small-omega real-spectrum thresholds", omega_thresholds},
      {"Monte Carlo against sigma^2 ||A_k#||_F^2", expected_values},
      {"semi-convergence", semi_convergence},
      {"gravity(128, 0.01) zero eigenvalue on [0.4, 1.6]", zero_plateau},
      {"CLI determinism", determinism},
  };

  int unexpected = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k + 1);
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool known = expected_fail.count(id) > 0;
    if (!o.pass && !known) ++unexpected;
    std::printf("Criterion %d: %s %s (%s) [%.1f s]%s\n", id, o.pass ? "PASS" : "FAIL", criteria[k].first.c_str(),
                o.detail.c_str(), secs, !o.pass && known ? " expected failure" : "");
    std::fflush(stdout);
  }
  return unexpected == 0 ? 0 : 1;
}
