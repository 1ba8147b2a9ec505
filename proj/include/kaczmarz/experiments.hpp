#pragma once

// Experiment drivers behind the command-line tool. Each command reads a
// validated ExperimentConfig, writes CSV (canonical), SVG and a summary JSON
// into its output directory together with the resolved config, and prints a
// short human-readable summary.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "kaczmarz/csv.hpp"
#include "kaczmarz/errors.hpp"
#include "kaczmarz/linalg.hpp"
#include "kaczmarz/noise_stats.hpp"
#include "kaczmarz/operator.hpp"
#include "kaczmarz/problem_io.hpp"
#include "kaczmarz/problems.hpp"
#include "kaczmarz/rng.hpp"
#include "kaczmarz/solvers.hpp"
#include "kaczmarz/spectral.hpp"
#include "kaczmarz/svg.hpp"

namespace kaczmarz {

inline constexpr const char* kOutputRootEnv = "KACZMARZ_OUTPUT_ROOT";

struct ProblemSpec {
  std::string name = "gravity";  // gravity | baart | paralleltomo | file
  std::size_t n = 128;           // gravity, baart
  double d = 0.01;               // gravity
  std::size_t N = 32;            // paralleltomo
  std::size_t angles = 32;
  std::size_t rays = 32;
  std::optional<double> detector_width;
  std::string file;                   // name == "file"
  std::string ordering = "default";   // default | random
  std::uint64_t ordering_seed = 7;
  std::string x_bar = "default";      // default | first_row
};

struct ExperimentConfig {
  ProblemSpec problem;
  SweepConfig solver;
  NoiseModel noise;
  std::string output_dir;
  std::vector<double> omegas;
  std::vector<std::size_t> ks{1, 2, 5, 10, 20, 50, 100};
  std::size_t realizations = 25;
  std::size_t mc_samples = 1000;
  double zero_tol = 1e-8;
  double im_tol = 1e-3;
  std::vector<std::string> methods{"standard"};
  bool bauer_fike = false;
  bool eigenvectors = false;
  std::optional<double> rank_tol;
};

// ---------------------------------------------------------------------------
// JSON <-> config

namespace detail {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

inline void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw InvalidArgument("config: '" + where + "' must be an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw InvalidArgument("config: unknown key '" + where + "." + k + "'");
}

template <class T>
void get_if(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw InvalidArgument("config: bad value for '" + where + "." + key + "'");
  }
}

}  // namespace detail

inline void validate(const ExperimentConfig& c) {
  const auto& p = c.problem;
  if (p.name != "gravity" && p.name != "baart" && p.name != "paralleltomo" && p.name != "file")
    throw InvalidArgument("config: unknown problem '" + p.name + "'");
  if (p.name == "file" && p.file.empty()) throw InvalidArgument("config: problem.file is required");
  if (p.ordering != "default" && p.ordering != "random")
    throw InvalidArgument("config: ordering must be 'default' or 'random'");
  if (p.x_bar != "default" && p.x_bar != "first_row")
    throw InvalidArgument("config: x_bar must be 'default' or 'first_row'");
  validate(c.solver);
  if (!(c.noise.sigma >= 0.0)) throw InvalidArgument("config: noise.sigma must be nonnegative");
  for (double w : c.omegas)
    if (!(w > 0.0 && w < 2.0)) throw InvalidArgument("config: omega grid values must lie in (0, 2)");
  for (std::size_t i = 1; i < c.omegas.size(); ++i)
    if (!(c.omegas[i] > c.omegas[i - 1])) throw InvalidArgument("config: omega grid must be increasing");
  for (std::size_t i = 1; i < c.ks.size(); ++i)
    if (!(c.ks[i] > c.ks[i - 1])) throw InvalidArgument("config: ks must be increasing");
  if (c.realizations < 1) throw InvalidArgument("config: realizations must be at least 1");
  if (c.mc_samples < 2) throw InvalidArgument("config: mc_samples must be at least 2");
  if (!(c.zero_tol >= 0.0) || !(c.im_tol >= 0.0)) throw InvalidArgument("config: tolerances must be nonnegative");
  for (const auto& m : c.methods)
    if (m != "standard" && m != "symmetric" && m != "randomized" && m != "cgls")
      throw InvalidArgument("config: unknown method '" + m + "'");
  if (c.methods.empty()) throw InvalidArgument("config: methods must not be empty");
}

/// Starts from the defaults and overlays every key present in `j`. Unknown
/// keys are rejected so typos do not silently fall back to defaults.
inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  using detail::get_if;
  ExperimentConfig c;
  detail::reject_unknown(j, {"problem", "solver", "noise", "output_dir", "omegas", "ks", "realizations",
                             "mc_samples", "zero_tol", "im_tol", "methods", "bauer_fike", "eigenvectors",
                             "rank_tol"},
                         "config");
  if (j.contains("problem")) {
    const auto& p = j.at("problem");
    detail::reject_unknown(p, {"name", "n", "d", "N", "angles", "rays", "detector_width", "file",
                               "ordering", "ordering_seed", "x_bar"},
                           "problem");
    get_if(p, "name", c.problem.name, "problem");
    get_if(p, "n", c.problem.n, "problem");
    get_if(p, "d", c.problem.d, "problem");
    get_if(p, "N", c.problem.N, "problem");
    get_if(p, "angles", c.problem.angles, "problem");
    get_if(p, "rays", c.problem.rays, "problem");
    if (p.contains("detector_width") && !p.at("detector_width").is_null()) {
      double w = 0.0;
      get_if(p, "detector_width", w, "problem");
      c.problem.detector_width = w;
    }
    get_if(p, "file", c.problem.file, "problem");
    get_if(p, "ordering", c.problem.ordering, "problem");
    get_if(p, "ordering_seed", c.problem.ordering_seed, "problem");
    get_if(p, "x_bar", c.problem.x_bar, "problem");
  }
  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    detail::reject_unknown(s, {"omega", "variant", "max_sweeps", "seed"}, "solver");
    get_if(s, "omega", c.solver.omega, "solver");
    std::string v = to_string(c.solver.variant);
    get_if(s, "variant", v, "solver");
    c.solver.variant = parse_variant(v);
    get_if(s, "max_sweeps", c.solver.max_sweeps, "solver");
    get_if(s, "seed", c.solver.seed, "solver");
  }
  if (j.contains("noise")) {
    const auto& n = j.at("noise");
    detail::reject_unknown(n, {"sigma", "seed"}, "noise");
    get_if(n, "sigma", c.noise.sigma, "noise");
    get_if(n, "seed", c.noise.seed, "noise");
  }
  get_if(j, "output_dir", c.output_dir, "config");
  get_if(j, "omegas", c.omegas, "config");
  get_if(j, "ks", c.ks, "config");
  get_if(j, "realizations", c.realizations, "config");
  get_if(j, "mc_samples", c.mc_samples, "config");
  get_if(j, "zero_tol", c.zero_tol, "config");
  get_if(j, "im_tol", c.im_tol, "config");
  get_if(j, "methods", c.methods, "config");
  get_if(j, "bauer_fike", c.bauer_fike, "config");
  get_if(j, "eigenvectors", c.eigenvectors, "config");
  if (j.contains("rank_tol") && !j.at("rank_tol").is_null()) {
    double t = 0.0;
    get_if(j, "rank_tol", t, "config");
    c.rank_tol = t;
  }
  validate(c);
  return c;
}

inline nlohmann::ordered_json config_to_json(const ExperimentConfig& c) {
  detail::ojson j;
  auto& p = j["problem"];
  p["name"] = c.problem.name;
  p["n"] = c.problem.n;
  p["d"] = c.problem.d;
  p["N"] = c.problem.N;
  p["angles"] = c.problem.angles;
  p["rays"] = c.problem.rays;
  p["detector_width"] = c.problem.detector_width ? detail::ojson(*c.problem.detector_width) : detail::ojson();
  p["file"] = c.problem.file;
  p["ordering"] = c.problem.ordering;
  p["ordering_seed"] = c.problem.ordering_seed;
  p["x_bar"] = c.problem.x_bar;
  auto& s = j["solver"];
  s["omega"] = c.solver.omega;
  s["variant"] = to_string(c.solver.variant);
  s["max_sweeps"] = c.solver.max_sweeps;
  s["seed"] = c.solver.seed;
  j["noise"]["sigma"] = c.noise.sigma;
  j["noise"]["seed"] = c.noise.seed;
  j["output_dir"] = c.output_dir;
  j["omegas"] = c.omegas;
  j["ks"] = c.ks;
  j["realizations"] = c.realizations;
  j["mc_samples"] = c.mc_samples;
  j["zero_tol"] = c.zero_tol;
  j["im_tol"] = c.im_tol;
  j["methods"] = c.methods;
  j["bauer_fike"] = c.bauer_fike;
  j["eigenvectors"] = c.eigenvectors;
  j["rank_tol"] = c.rank_tol ? detail::ojson(*c.rank_tol) : detail::ojson();
  return j;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidArgument("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  return config_from_json(j);
}

/// Output directory: explicit setting, else $KACZMARZ_OUTPUT_ROOT/<command>,
/// else ./kaczmarz_out/<command>.
inline std::string resolve_output_dir(const ExperimentConfig& c, const std::string& command) {
  if (!c.output_dir.empty()) return c.output_dir;
  const char* root = std::getenv(kOutputRootEnv);
  return (std::filesystem::path(root && *root ? root : "kaczmarz_out") / command).string();
}

// ---------------------------------------------------------------------------
// Problem construction

inline TestProblem make_problem(const ProblemSpec& s) {
  TestProblem p;
  if (s.name == "gravity")
    p = gravity(s.n, s.d);
  else if (s.name == "baart")
    p = baart(s.n);
  else if (s.name == "paralleltomo")
    p = paralleltomo(ParallelTomoOptions{s.N, s.angles, s.rays, s.detector_width});
  else if (s.name == "file")
    p = load_problem(s.file);
  else
    throw InvalidArgument("unknown problem '" + s.name + "'");
  if (s.ordering == "random") p = apply_ordering(p, random_ordering(p.m(), s.ordering_seed));
  if (s.x_bar == "first_row") {
    p.x_bar.assign(p.A.row(0).begin(), p.A.row(0).end());
    p.b_bar = matvec(p.A, p.x_bar);
  }
  return p;
}

/// Compact form for labels and console output; CSV cells keep full precision.
inline std::string short_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string problem_label(const ProblemSpec& s) {
  std::string out = s.name;
  if (s.name == "gravity") out += "(n=" + std::to_string(s.n) + ", d=" + short_real(s.d) + ")";
  if (s.name == "baart") out += "(n=" + std::to_string(s.n) + ")";
  if (s.name == "paralleltomo")
    out += "(N=" + std::to_string(s.N) + ", angles=" + std::to_string(s.angles) +
           ", rays=" + std::to_string(s.rays) + ")";
  if (s.ordering == "random") out += " random order seed " + std::to_string(s.ordering_seed);
  return out;
}

// ---------------------------------------------------------------------------
// Output helpers

class OutputDir {
 public:
  OutputDir(const ExperimentConfig& c, const std::string& command)
      : path_(resolve_output_dir(c, command)) {
    std::error_code ec;
    std::filesystem::create_directories(path_, ec);
    if (ec) throw InvalidArgument("cannot create output directory '" + path_.string() + "'");
    ExperimentConfig resolved = c;
    resolved.output_dir = path_.string();
    write_text("config.json", config_to_json(resolved).dump(2) + "\n");
  }

  std::ofstream open(const std::string& name) const {
    std::ofstream os(path_ / name, std::ios::binary);
    if (!os) throw InvalidArgument("cannot write '" + (path_ / name).string() + "'");
    return os;
  }

  void write_text(const std::string& name, const std::string& text) const { open(name) << text; }

  void write_json(const std::string& name, const nlohmann::ordered_json& j) const {
    write_text(name, j.dump(2) + "\n");
  }

  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string fixed10(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.10f", v);
  return buf;
}

inline std::string sci(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.4e", v);
  return buf;
}

inline std::vector<double> default_omega_grid() {
  std::vector<double> g;
  for (int i = 1; i <= 99; ++i) g.push_back(0.02 * i);
  return g;
}

// ---------------------------------------------------------------------------
// Commands

/// Spectrum of G|_V: spectrum.csv (idx, re, im, modulus), eigplot.svg, summary.json.
inline int cmd_eigplot(const ExperimentConfig& c, std::ostream& out) {
  validate(c);
  OutputDir dir(c, "eigplot");
  const TestProblem p = make_problem(c.problem);
  const SvdResult s = svd(p.A, c.rank_tol);
  const RestrictedOperator ro = restrict_to_V(p.A, build_L(p.A, c.solver.omega), s);
  const SpectrumReport sr = spectrum(ro, c.zero_tol, c.eigenvectors);
  {
    auto os = dir.open("spectrum.csv");
    CsvWriter w(os, {"idx", "re", "im", "modulus"});
    for (std::size_t i = 0; i < sr.eigenvalues.size(); ++i)
      w.row(i, sr.eigenvalues[i].real(), sr.eigenvalues[i].imag(), std::abs(sr.eigenvalues[i]));
  }
  {
    auto os = dir.open("eigplot.svg");
    svg::eigen_scatter(os, sr.eigenvalues,
                       "eigenvalues of G, " + problem_label(c.problem) + ", omega=" + short_real(c.solver.omega));
  }
  nlohmann::ordered_json j;
  j["problem"] = problem_label(c.problem);
  j["m"] = p.m();
  j["n"] = p.n();
  j["rank"] = s.rank();
  j["omega"] = c.solver.omega;
  j["rho"] = sr.rho;
  j["one_minus_rho"] = 1.0 - sr.rho;
  j["zero_count"] = sr.zero_count;
  j["zero_tol"] = sr.zero_tol;
  j["top_is_complex_pair"] = sr.top_is_complex_pair;
  j["all_real"] = std::all_of(sr.eigenvalues.begin(), sr.eigenvalues.end(),
                              [](const Complex& l) { return l.imag() == 0.0; });
  if (c.eigenvectors) {
    j["kappa_W"] = sr.kappa_W;
    j["near_defective"] = sr.near_defective;
  }
  dir.write_json("summary.json", j);

  out << "problem      " << problem_label(c.problem) << "  (m=" << p.m() << ", n=" << p.n()
      << ", rank=" << s.rank() << ")\n";
  out << "rho          " << fixed10(sr.rho) << "\n";
  out << "1 - rho      " << sci(1.0 - sr.rho) << "\n";
  out << "zero count   " << sr.zero_count << " (|lambda| <= " << sci(c.zero_tol) << ")\n";
  if (sr.top_is_complex_pair) out << "note         maximum modulus attained by a complex conjugate pair\n";
  if (sr.near_defective) out << "warning      eigenvector matrix near-defective, kappa = " << sci(sr.kappa_W) << "\n";
  out << "output       " << dir.path().string() << "\n";
  return 0;
}

/// Error histories per method. Noise-free: history_<method>.csv. With
/// sigma > 0: split_<method>.csv (k, recon, iter, noise, realization).
inline int cmd_errhist(const ExperimentConfig& c, std::ostream& out) {
  validate(c);
  OutputDir dir(c, "errhist");
  const TestProblem p = make_problem(c.problem);
  const std::size_t K = c.solver.max_sweeps;
  nlohmann::ordered_json summary;
  summary["problem"] = problem_label(c.problem);
  std::vector<svg::Series> clean_series;

  auto method_cfg = [&](const std::string& m) {
    SweepConfig sc = c.solver;
    sc.variant = parse_variant(m);
    return sc;
  };

  for (const auto& m : c.methods) {
    IterationHistory h = m == "cgls" ? cgls(p.A, p.b_bar, std::max<std::size_t>(K, 1), p.x_bar, false)
                                     : run(p.A, p.b_bar, method_cfg(m), p.x_bar);
    {
      auto os = dir.open("history_" + m + ".csv");
      write_history_csv(os, h);
    }
    svg::Series sr{m, {}, {}};
    for (std::size_t k = 0; k < h.error_norms.size(); ++k) {
      sr.x.push_back(static_cast<double>(k));
      sr.y.push_back(h.error_norms[k] / std::max(norm2(p.x_bar), 1e-300));
    }
    clean_series.push_back(std::move(sr));
    summary["noise_free"][m]["final_error"] = h.error_norms.back();
    summary["noise_free"][m]["relative_final_error"] = h.error_norms.back() / norm2(p.x_bar);
    if (m == "cgls") summary["noise_free"][m]["breakdown"] = h.breakdown;
    out << m << ": relative error after " << h.sweep_count << " iterations = "
        << sci(h.error_norms.back() / norm2(p.x_bar)) << "\n";
  }
  {
    auto os = dir.open("errhist.svg");
    svg::line_plot(os, clean_series, "noise-free error histories, " + problem_label(c.problem), "k",
                   "||x_k - x_bar|| / ||x_bar||", true);
  }

  if (c.noise.sigma > 0.0) {
    for (const auto& m : c.methods) {
      auto os = dir.open("split_" + m + ".csv");
      CsvWriter w(os, {"k", "recon", "iter", "noise", "realization"});
      std::vector<std::size_t> minima;
      std::vector<svg::Series> series;
      for (std::size_t j = 0; j < c.realizations; ++j) {
        const Vector b = add_noise(p.b_bar, NoiseModel{c.noise.sigma, substream_seed(c.noise.seed, j)});
        const ErrorSplit es = m == "cgls" ? error_split_cgls(p, b, std::max<std::size_t>(K, 1))
                                          : error_split(p, b, method_cfg(m), K);
        for (std::size_t k = 0; k < es.recon_err.size(); ++k)
          w.row(k, es.recon_err[k], es.iter_err[k], es.noise_err[k], j);
        if (es.recon_err.size() >= 2) minima.push_back(semiconvergence_min(es));
        svg::Series sr{j == 0 ? m : "", {}, {}};
        for (std::size_t k = 0; k < es.recon_err.size(); ++k) {
          sr.x.push_back(static_cast<double>(k));
          sr.y.push_back(es.recon_err[k]);
        }
        series.push_back(std::move(sr));
      }
      summary["noisy"][m]["argmin_recon"] = minima;
      std::size_t interior = 0;
      for (std::size_t k : minima)
        if (k > 0 && k < K) ++interior;
      summary["noisy"][m]["interior_minima"] = interior;
      out << m << ": " << interior << "/" << c.realizations
          << " realizations with an interior minimum of the reconstruction error\n";
      auto svgos = dir.open("split_" + m + ".svg");
      svg::line_plot(svgos, series, "reconstruction error, " + m + ", sigma=" + short_real(c.noise.sigma), "k",
                     "||x_k - x_bar||", true);
    }
  }
  dir.write_json("summary.json", summary);
  out << "output       " << dir.path().string() << "\n";
  return 0;
}

/// scan.csv (omega, rho, max_im, zero_count, n_nonpos_real), summary.json with omega0.
inline int cmd_omegasweep(const ExperimentConfig& c, std::ostream& out) {
  validate(c);
  OutputDir dir(c, "omegasweep");
  const TestProblem p = make_problem(c.problem);
  const SvdResult s = svd(p.A, c.rank_tol);
  const std::vector<double> grid = c.omegas.empty() ? default_omega_grid() : c.omegas;
  const ScanResult sc = small_omega_scan(p.A, s, grid, c.im_tol, c.zero_tol);
  {
    auto os = dir.open("scan.csv");
    CsvWriter w(os, {"omega", "rho", "max_im", "zero_count", "n_nonpos_real"});
    for (const auto& pt : sc.points) w.row(pt.omega, pt.rho, pt.max_im, pt.zero_count, pt.n_nonpos_real);
  }
  svg::Series rho{"rho", {}, {}}, im{"max |Im|", {}, {}}, zc{"zero count", {}, {}};
  for (const auto& pt : sc.points) {
    rho.x.push_back(pt.omega);
    rho.y.push_back(pt.rho);
    im.x.push_back(pt.omega);
    im.y.push_back(pt.max_im);
    zc.x.push_back(pt.omega);
    zc.y.push_back(static_cast<double>(pt.zero_count));
  }
  {
    auto os = dir.open("scan_spectrum.svg");
    svg::line_plot(os, {rho, im}, "omega scan, " + problem_label(c.problem), "omega", "value", false);
  }
  {
    auto os = dir.open("scan_zeros.svg");
    svg::line_plot(os, {zc}, "zero eigenvalues, " + problem_label(c.problem), "omega", "count", false);
  }
  nlohmann::ordered_json j;
  j["problem"] = problem_label(c.problem);
  j["im_tol"] = c.im_tol;
  j["zero_tol"] = c.zero_tol;
  j["omega0"] = sc.omega0 ? nlohmann::ordered_json(*sc.omega0) : nlohmann::ordered_json();
  std::size_t min_zero = std::numeric_limits<std::size_t>::max();
  for (const auto& pt : sc.points)
    if (pt.omega >= 0.4 - 1e-12 && pt.omega <= 1.6 + 1e-12) min_zero = std::min(min_zero, pt.zero_count);
  if (min_zero != std::numeric_limits<std::size_t>::max()) j["min_zero_count_0.4_1.6"] = min_zero;
  dir.write_json("summary.json", j);
  out << "problem      " << problem_label(c.problem) << "\n";
  out << "omega0       " << (sc.omega0 ? short_real(*sc.omega0) : std::string("none")) << " (im_tol "
      << sci(c.im_tol) << ")\n";
  if (j.contains("min_zero_count_0.4_1.6"))
    out << "min zero count on [0.4, 1.6]: " << min_zero << "\n";
  out << "output       " << dir.path().string() << "\n";
  return 0;
}

/// expectation.csv (k, E1, E2, mc, stderr), xi.csv (i, re, im, modulus,
/// lambda_modulus), monotonicity.csv (k, E2_unit), summary.json.
inline int cmd_noisestats(const ExperimentConfig& c, std::ostream& out) {
  validate(c);
  if (c.solver.variant == SweepVariant::randomized)
    throw InvalidArgument("noisestats: the randomized variant has no fixed iteration operator");
  if (c.ks.empty()) throw InvalidArgument("noisestats: ks must not be empty");
  OutputDir dir(c, "noisestats");
  const TestProblem p = make_problem(c.problem);
  const SvdResult s = svd(p.A, c.rank_tol);
  const OperatorKind kind =
      c.solver.variant == SweepVariant::symmetric ? OperatorKind::symmetric : OperatorKind::standard;
  const SharpMaps sm(p.A, build_L(p.A, c.solver.omega), s, kind);

  ExpectationOptions opt;
  opt.n_mc = c.mc_samples;
  opt.seed = c.noise.seed;
  opt.variant = c.solver.variant;
  const ExpectationReport er = expected_norms(p.A, sm, c.noise.sigma, c.ks, opt);
  {
    auto os = dir.open("expectation.csv");
    CsvWriter w(os, {"k", "E1", "E2", "mc", "stderr"});
    for (std::size_t t = 0; t < er.ks.size(); ++t) w.row(er.ks[t], er.E1[t], er.E2[t], er.mc_estimate[t], er.mc_stderr[t]);
  }
  const Vector e = gaussian_noise(p.m(), c.noise);
  const XiProfile xp = xi_profile(sm, e, c.ks);
  {
    auto os = dir.open("xi.csv");
    CsvWriter w(os, {"i", "re", "im", "modulus", "lambda_modulus"});
    for (std::size_t i = 0; i < xp.xi.size(); ++i)
      w.row(i, xp.xi[i].real(), xp.xi[i].imag(), std::abs(xp.xi[i]), std::abs(xp.lambda[i]));
  }
  std::vector<std::size_t> all_k(c.ks.back());
  std::iota(all_k.begin(), all_k.end(), std::size_t{1});
  const MonotonicityReport mr = monotonicity_probe(sm.eigenvalues(), all_k);
  {
    auto os = dir.open("monotonicity.csv");
    CsvWriter w(os, {"k", "E2_unit"});
    for (std::size_t t = 0; t < mr.ks.size(); ++t) w.row(mr.ks[t], mr.E2[t]);
  }
  svg::Series s1{"E1", {}, {}}, s2{"E2", {}, {}}, s3{"Monte Carlo", {}, {}};
  double max_gap = 0.0;
  for (std::size_t t = 0; t < er.ks.size(); ++t) {
    const double k = static_cast<double>(er.ks[t]);
    s1.x.push_back(k); s1.y.push_back(er.E1[t]);
    s2.x.push_back(k); s2.y.push_back(er.E2[t]);
    s3.x.push_back(k); s3.y.push_back(er.mc_estimate[t]);
    if (er.E1[t] > 0.0 && er.E2[t] > 0.0)
      max_gap = std::max(max_gap, std::abs(std::log10(er.E1[t]) - std::log10(er.E2[t])));
  }
  {
    auto os = dir.open("expectation.svg");
    svg::line_plot(os, {s1, s2, s3}, "expected noise error, " + problem_label(c.problem), "k", "value", true);
  }
  nlohmann::ordered_json j;
  j["problem"] = problem_label(c.problem);
  j["kind"] = kind == OperatorKind::symmetric ? "symmetric" : "standard";
  j["kappa_W"] = sm.kappa();
  j["max_abs_log10_E1_over_E2"] = max_gap;
  j["E2_unit_monotone"] = mr.E2_monotone;
  j["nonmonotone_factor_curves"] = mr.nonmonotone_factors;
  dir.write_json("summary.json", j);
  out << "problem      " << problem_label(c.problem) << ", sigma=" << short_real(c.noise.sigma) << "\n";
  for (std::size_t t = 0; t < er.ks.size(); ++t)
    out << "k=" << er.ks[t] << "  E1=" << sci(er.E1[t]) << "  E2=" << sci(er.E2[t]) << "  mc=" << sci(er.mc_estimate[t])
        << " +- " << sci(er.mc_stderr[t]) << "\n";
  out << "max |log10 E1 - log10 E2| = " << sci(max_gap) << "\n";
  out << "E2 with unit xi variances monotone: " << (mr.E2_monotone ? "yes" : "no") << " ("
      << mr.nonmonotone_factors << " factor curves with bumps)\n";
  out << "output       " << dir.path().string() << "\n";
  return 0;
}

/// bounds.csv: one row per omega.
inline int cmd_bounds(const ExperimentConfig& c, std::ostream& out) {
  validate(c);
  OutputDir dir(c, "bounds");
  const TestProblem p = make_problem(c.problem);
  const SvdResult s = svd(p.A, c.rank_tol);
  const std::vector<double> grid = c.omegas.empty() ? std::vector<double>{c.solver.omega} : c.omegas;
  auto os = dir.open("bounds.csv");
  CsvWriter w(os, {"problem", "omega", "rho", "norm_G", "sigma_min", "norm_L", "bound_L", "nu", "bound_nu",
                   "bf_bound", "be_bound", "assumption_met"});
  for (double omega : grid) {
    const LFactor lf = build_L(p.A, omega);
    const BoundsReport br = rho_bounds(p.A, s, lf, restrict_to_V(p.A, lf, s), c.bauer_fike);
    w.row(problem_label(c.problem), omega, br.rho_actual, br.norm_G, br.sigma_min, br.norm_L, br.bound_L, br.nu,
          br.bound_nu, br.bf_bound ? format_real(*br.bf_bound) : std::string(""), br.be_bound, br.assumption_met);
    out << "omega=" << short_real(omega) << "  1-rho=" << sci(1 - br.rho_actual) << "  1-||G||=" << sci(1 - br.norm_G)
        << "  1-bound_L=" << sci(1 - br.bound_L) << "  1-bound_nu=" << sci(1 - br.bound_nu)
        << (br.assumption_met ? "" : "  [assumption unmet]") << "\n";
  }
  out << "output       " << dir.path().string() << "\n";
  return 0;
}

/// structure.json and structure.csv (key, value).
inline int cmd_structure(const ExperimentConfig& c, std::ostream& out) {
  validate(c);
  OutputDir dir(c, "structure");
  const TestProblem p = make_problem(c.problem);
  const StructureReport r = structural_orthogonality(p.A);
  nlohmann::ordered_json j;
  j["problem"] = problem_label(c.problem);
  j["m"] = p.m();
  j["n"] = p.n();
  j["leading_diag_block"] = r.leading_diag_block;
  j["orth_pairs"] = r.orth_pairs;
  j["total_pairs"] = r.total_pairs;
  j["near_orth"] = r.near_orth;
  j["dropped_rows"] = p.row_origin.empty() ? 0 : c.problem.angles * c.problem.rays - p.m();
  dir.write_json("structure.json", j);
  {
    auto os = dir.open("structure.csv");
    CsvWriter w(os, {"key", "value"});
    w.row("leading_diag_block", r.leading_diag_block);
    w.row("orth_pairs", r.orth_pairs);
    w.row("total_pairs", r.total_pairs);
    w.row("near_orth", r.near_orth);
  }
  out << "problem              " << problem_label(c.problem) << "\n";
  out << "leading diag block   " << r.leading_diag_block << "\n";
  out << "orthogonal pairs     " << r.orth_pairs << " of " << r.total_pairs << "\n";
  out << "|a1^T a2|            " << format_real(r.near_orth) << "\n";
  out << "output               " << dir.path().string() << "\n";
  return 0;
}

/// Writes the generated problem as a container file (problem.csv).
inline int cmd_export(const ExperimentConfig& c, std::ostream& out) {
  validate(c);
  OutputDir dir(c, "export");
  const TestProblem p = make_problem(c.problem);
  auto os = dir.open("problem.csv");
  write_problem(os, p);
  out << "wrote " << (dir.path() / "problem.csv").string() << " (m=" << p.m() << ", n=" << p.n() << ")\n";
  return 0;
}

}  // namespace kaczmarz
