// kaczmarz: command-line driver for the spectral and noise experiments.
//
//   kaczmarz <command> [--config file.json] [flags]
//
// Flags override values from the config file. Exit codes: 0 success,
// 2 configuration error, 3 numerical failure.

#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kaczmarz/experiments.hpp"

namespace {

using nlohmann::json;

struct Overrides {
  std::string config;
  std::optional<std::string> output, problem, problem_file, ordering, x_bar, variant;
  std::optional<std::size_t> n, N, angles, rays, sweeps, realizations, mc_samples;
  std::optional<double> d, detector_width, omega, sigma, zero_tol, im_tol, rank_tol;
  std::optional<std::uint64_t> ordering_seed, solver_seed, noise_seed;
  std::vector<double> omegas;
  std::vector<std::size_t> ks;
  std::vector<std::string> methods;
  bool bauer_fike = false, eigenvectors = false;
};

void add_options(CLI::App* sub, Overrides& o) {
  sub->add_option("-c,--config", o.config, "JSON config file");
  sub->add_option("-o,--output", o.output, "output directory");
  sub->add_option("--problem", o.problem, "gravity | baart | paralleltomo | file");
  sub->add_option("--problem-file", o.problem_file, "problem container file (implies --problem file)");
  sub->add_option("--n", o.n, "size for gravity and baart");
  sub->add_option("--d", o.d, "depth parameter of gravity");
  sub->add_option("--N", o.N, "image side for paralleltomo");
  sub->add_option("--angles", o.angles, "number of projection angles");
  sub->add_option("--rays", o.rays, "rays per angle");
  sub->add_option("--detector-width", o.detector_width, "distance between first and last ray");
  sub->add_option("--ordering", o.ordering, "default | random");
  sub->add_option("--ordering-seed", o.ordering_seed, "seed of the random row ordering");
  sub->add_option("--x-bar", o.x_bar, "default | first_row");
  sub->add_option("--omega", o.omega, "relaxation parameter in (0, 2)");
  sub->add_option("--variant", o.variant, "standard | symmetric | randomized");
  sub->add_option("--sweeps", o.sweeps, "number of sweeps");
  sub->add_option("--solver-seed", o.solver_seed, "seed of the randomized variant");
  sub->add_option("--sigma", o.sigma, "noise standard deviation");
  sub->add_option("--noise-seed", o.noise_seed, "noise seed");
  sub->add_option("--omegas", o.omegas, "omega grid")->delimiter(',');
  sub->add_option("--ks", o.ks, "sweep counts")->delimiter(',');
  sub->add_option("--methods", o.methods, "standard,symmetric,randomized,cgls")->delimiter(',');
  sub->add_option("--realizations", o.realizations, "noise realizations");
  sub->add_option("--mc-samples", o.mc_samples, "Monte Carlo draws");
  sub->add_option("--zero-tol", o.zero_tol, "tolerance for zero eigenvalues");
  sub->add_option("--im-tol", o.im_tol, "tolerance on |Im lambda| in the omega scan");
  sub->add_option("--rank-tol", o.rank_tol, "relative rank cut of the SVD");
  sub->add_flag("--bauer-fike", o.bauer_fike, "include the Bauer-Fike bound");
  sub->add_flag("--eigenvectors", o.eigenvectors, "compute eigenvectors and their condition number");
}

template <class T>
void put(json& j, std::initializer_list<const char*> path, const std::optional<T>& v) {
  if (!v) return;
  json* cur = &j;
  for (const char* key : path) cur = &(*cur)[key];
  *cur = *v;
}

kaczmarz::ExperimentConfig resolve(const Overrides& o) {
  json j = json::object();
  if (!o.config.empty()) {
    std::ifstream is(o.config);
    if (!is) throw kaczmarz::InvalidArgument("cannot open config '" + o.config + "'");
    try {
      j = json::parse(is);
    } catch (const json::exception& e) {
      throw kaczmarz::InvalidArgument(std::string("config: ") + e.what());
    }
  }
  put(j, {"output_dir"}, o.output);
  put(j, {"problem", "name"}, o.problem);
  if (o.problem_file) {
    j["problem"]["name"] = "file";
    j["problem"]["file"] = *o.problem_file;
  }
  put(j, {"problem", "n"}, o.n);
  put(j, {"problem", "d"}, o.d);
  put(j, {"problem", "N"}, o.N);
  put(j, {"problem", "angles"}, o.angles);
  put(j, {"problem", "rays"}, o.rays);
  put(j, {"problem", "detector_width"}, o.detector_width);
  put(j, {"problem", "ordering"}, o.ordering);
  put(j, {"problem", "ordering_seed"}, o.ordering_seed);
  put(j, {"problem", "x_bar"}, o.x_bar);
  put(j, {"solver", "omega"}, o.omega);
  put(j, {"solver", "variant"}, o.variant);
  put(j, {"solver", "max_sweeps"}, o.sweeps);
  put(j, {"solver", "seed"}, o.solver_seed);
  put(j, {"noise", "sigma"}, o.sigma);
  put(j, {"noise", "seed"}, o.noise_seed);
  if (!o.omegas.empty()) j["omegas"] = o.omegas;
  if (!o.ks.empty()) j["ks"] = o.ks;
  if (!o.methods.empty()) j["methods"] = o.methods;
  put(j, {"realizations"}, o.realizations);
  put(j, {"mc_samples"}, o.mc_samples);
  put(j, {"zero_tol"}, o.zero_tol);
  put(j, {"im_tol"}, o.im_tol);
  put(j, {"rank_tol"}, o.rank_tol);
  if (o.bauer_fike) j["bauer_fike"] = true;
  if (o.eigenvectors) j["eigenvectors"] = true;
  return kaczmarz::config_from_json(j);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kaczmarz iteration operators: spectra, bounds and noise propagation"};
  app.require_subcommand(1);

  using Command = std::function<int(const kaczmarz::ExperimentConfig&, std::ostream&)>;
  const std::vector<std::tuple<std::string, std::string, Command>> commands{
      {"eigplot", "spectrum of the restricted iteration operator", kaczmarz::cmd_eigplot},
      {"errhist", "error histories and noise splits", kaczmarz::cmd_errhist},
      {"omegasweep", "spectrum statistics over an omega grid", kaczmarz::cmd_omegasweep},
      {"noisestats", "expected noise-error norms and xi coefficients", kaczmarz::cmd_noisestats},
      {"bounds", "upper bounds on the spectral radius", kaczmarz::cmd_bounds},
      {"structure", "structural orthogonality of the rows", kaczmarz::cmd_structure},
      {"export", "write the generated problem as a container file", kaczmarz::cmd_export},
  };

  std::map<std::string, Overrides> overrides;
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, help, fn] : commands) {
    subs[name] = app.add_subcommand(name, help);
    add_options(subs[name], overrides[name]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  for (const auto& [name, help, fn] : commands) {
    if (!subs[name]->parsed()) continue;
    try {
      return fn(resolve(overrides[name]), std::cout);
    } catch (const kaczmarz::InvalidArgument& e) {
      std::cerr << "configuration error: " << e.what() << "\n";
      return 2;
    } catch (const kaczmarz::NumericalError& e) {
      std::cerr << "numerical failure: " << e.what() << "\n";
      return 3;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 3;
    }
  }
  return 2;
}
