// Command-line front end: build, rate-sweep, verify, catalog.
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ridgeapprox/errors.hpp"
#include "ridgeapprox/experiment.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<std::string> target, epsilon, mode, mass_mode, out;
  std::vector<std::string> methods;
  std::vector<long> m;
  std::vector<std::uint64_t> seeds;
  std::optional<int> order, m0, quad_nodes, grid, threads;
  bool allow_large = false;
};

void add_common(CLI::App* cmd, Overrides& o, bool sweep) {
  cmd->add_option("--config", o.config, "JSON config file (flags override it)");
  cmd->add_option("--target", o.target, "target name, see 'catalog'");
  if (sweep) {
    cmd->add_option("--methods", o.methods, "methods to sweep")->delimiter(',');
    cmd->add_option("--m", o.m, "strictly increasing m values")->delimiter(',');
    cmd->add_option("--seeds", o.seeds, "seed list")->delimiter(',');
  } else {
    cmd->add_option("--method", o.methods, "iid, iid-simplified, stratified-signed, stratified-fractional, sparse")
        ->expected(1);
    cmd->add_option("--m", o.m, "number of ridge terms")->expected(1);
    cmd->add_option("--seed", o.seeds, "seed")->expected(1);
  }
  cmd->add_option("--s", o.order, "2 (ReLU) or 3 (squared ReLU)");
  cmd->add_option("--epsilon", o.epsilon, "default, inverse-m, or a positive number");
  cmd->add_option("--mode", o.mode, "allocation for method 'stratified': signed or fractional");
  cmd->add_option("--m0", o.m0, "inner sparsity budget for the sparse method");
  cmd->add_option("--mass-mode", o.mass_mode, "exact or estimated stratum masses");
  cmd->add_option("--quad-nodes", o.quad_nodes, "Gauss-Legendre nodes per axis for L2");
  cmd->add_option("--grid", o.grid, "grid points per axis for the sup norm");
  cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)");
  cmd->add_flag("--allow-large", o.allow_large, "lift the d/m/seed guards");
  cmd->add_option("--out", o.out, "output directory");
}

std::optional<std::uint64_t> env_seed() {
  const char* s = std::getenv("RIDGE_SEED");
  if (!s || !*s) return std::nullopt;
  try {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (used == std::string(s).size()) return v;
  } catch (const std::exception&) {
  }
  throw ridge::UsageError("RIDGE_SEED is not an unsigned integer");
}

ridge::ExperimentConfig resolve(const Overrides& o) {
  ridge::ExperimentConfig cfg;
  if (auto s = env_seed()) cfg.seeds = {*s};
  if (!o.config.empty()) {
    const auto j = ridge::io::read_json(o.config);
    auto from_file = ridge::ExperimentConfig::from_json(j);
    if (!j.contains("seeds") && !j.contains("seed")) from_file.seeds = cfg.seeds;
    cfg = from_file;
  }
  if (o.target) cfg.target = *o.target;
  if (!o.methods.empty()) cfg.methods = o.methods;
  if (!o.m.empty()) cfg.m = o.m;
  if (!o.seeds.empty()) cfg.seeds = o.seeds;
  if (o.order) cfg.order = *o.order;
  if (o.epsilon) cfg.epsilon = *o.epsilon;
  if (o.m0) cfg.m0 = *o.m0;
  if (o.mass_mode) cfg.mass_mode = *o.mass_mode;
  if (o.quad_nodes) cfg.quad_nodes = *o.quad_nodes;
  if (o.grid) cfg.grid_resolution = *o.grid;
  if (o.threads) cfg.threads = *o.threads;
  if (o.allow_large) cfg.allow_large = true;
  if (o.out) cfg.out = *o.out;
  const std::string mode = o.mode.value_or("fractional");
  if (mode != "signed" && mode != "fractional") throw ridge::UsageError("mode must be 'signed' or 'fractional'");
  for (auto& mt : cfg.methods)
    if (mt == "stratified") mt = "stratified-" + mode;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse ridge-function approximation experiments"};
  app.require_subcommand(1);

  Overrides build_opts, sweep_opts;
  auto* build = app.add_subcommand("build", "build one approximant and measure its error");
  add_common(build, build_opts, false);
  auto* sweep = app.add_subcommand("rate-sweep", "error rates over m, seeds and methods");
  add_common(sweep, sweep_opts, true);

  auto* verify = app.add_subcommand("verify", "run a fixed-tolerance check suite");
  std::string which;
  std::optional<std::uint64_t> verify_seed;
  std::optional<std::string> verify_out;
  verify->add_option("suite", which, "identities, sine-family, packing, sampler-fit")->required();
  verify->add_option("--seed", verify_seed, "seed");
  verify->add_option("--out", verify_out, "directory for the JSON report");

  auto* cat = app.add_subcommand("catalog", "list target names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return ridge::kExitConfig;
  }

  try {
    if (*build) return ridge::run_build(resolve(build_opts));
    if (*sweep) return ridge::run_rate_sweep(resolve(sweep_opts));
    if (*verify) {
      std::uint64_t seed = 1;
      if (auto s = env_seed()) seed = *s;
      if (verify_seed) seed = *verify_seed;
      std::optional<std::filesystem::path> out;
      if (verify_out) out = *verify_out;
      return ridge::run_verify(which, seed, out);
    }
    if (*cat) {
      for (const auto& [name, text] : ridge::catalog()) std::cout << name << "\n    " << text << "\n";
      return ridge::kExitOk;
    }
  } catch (const ridge::UsageError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return ridge::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ridge::kExitBuild;
  }
  return ridge::kExitConfig;
}
