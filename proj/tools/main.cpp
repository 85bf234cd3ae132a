#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "vela/config.hpp"
#include "vela/error.hpp"
#include "vela/run.hpp"

namespace {

int thread_count() {
  const char* env = std::getenv("VELA_THREADS");
  if (!env) return 1;
  try {
    return std::max(1, std::stoi(env));
  } catch (const std::exception&) {
    throw vela::ConfigError("VELA_THREADS must be a positive integer");
  }
}

vela::RunConfig build_config(const std::string& path, const std::vector<std::string>& overrides) {
  vela::RunConfig c = path.empty() ? vela::RunConfig{} : vela::load_config(path);
  for (const auto& o : overrides) vela::apply_override(c, o);
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Incompressible viscoelastic solver with vector-field energy diagnostics"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  bool quiet = false;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "INI config file")->check(CLI::ExistingFile);
    sub->add_option("-s,--set", overrides, "Override a key, e.g. --set material.nu=0.01");
    sub->add_flag("-q,--quiet", quiet, "No progress output");
  };

  auto* simulate = app.add_subcommand("simulate", "Run one simulation and write CSV, snapshots and a summary");
  add_common(simulate);
  auto* sweep = app.add_subcommand("sweep", "Run the same initial data across the sweep.nu viscosities");
  add_common(sweep);
  auto* nullcheck = app.add_subcommand("nullcheck", "Check the null condition of the configured material model");
  add_common(nullcheck);
  auto* inequalities = app.add_subcommand("inequalities", "Run the Hardy and radial Sobolev batteries");
  add_common(inequalities);
  auto* inspect = app.add_subcommand("inspect", "Print the contents of a snapshot");
  std::string snapshot;
  inspect->add_option("snapshot", snapshot, "Snapshot file")->required()->check(CLI::ExistingFile);
  auto* defaults = app.add_subcommand("defaults", "Print the default config");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*defaults) {
      std::cout << vela::write_config(vela::RunConfig{});
      return 0;
    }
    if (*inspect) return vela::inspect_snapshot(snapshot, std::cout);

    const vela::RunConfig cfg = build_config(config_path, overrides);
    if (*nullcheck) return vela::run_nullcheck(cfg, std::cout);
    if (*inequalities) return vela::run_inequalities(cfg, std::cout);

    vela::RunOptions opt;
    opt.log = quiet ? nullptr : &std::cerr;
    if (*simulate) {
      const vela::RunResult r = vela::run_simulation(cfg, opt);
      std::cout << vela::summary_text(r);
      if (cfg.null_check) {
        const int rc = vela::run_nullcheck(cfg, std::cout);
        if (rc != 0 && r.exit_code() == 0) return rc;
      }
      return r.exit_code();
    }
    if (*sweep) {
      const vela::SweepReport rep = vela::run_sweep(cfg, cfg.nu_list, opt, thread_count());
      std::cout << vela::sweep_text(rep);
      return rep.exit_code();
    }
  } catch (const vela::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 64;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
