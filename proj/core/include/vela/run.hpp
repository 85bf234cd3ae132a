#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vela/config.hpp"
#include "vela/diagnostics.hpp"
#include "vela/dynamics.hpp"
#include "vela/inequalities.hpp"
#include "vela/nullcheck.hpp"

namespace vela {

struct RunOptions {
  /// Write CSV, snapshots and the summary under config.dir.
  bool write_files = true;
  /// Progress lines; null for silence.
  std::ostream* log = nullptr;
  /// Use this state instead of generating initial data from the seed.
  const State* initial = nullptr;
};

struct RunResult {
  RunConfig config;
  std::vector<EnergyReport> rows;
  std::vector<DecayEntry> led;
  std::vector<MonitorSample> history;
  TheoremVerdict verdict;

  ConstraintResiduals initial_residuals;
  ConstraintResiduals max_residuals;
  /// max over rows of ||grad p|| / (||N^v|| + ||M^H||).
  double pressure_ratio_max = 0.0;
  /// max over rows of ||grad p (projection) - grad p (Poisson)|| / ||grad p (projection)||.
  double pressure_path_diff_max = 0.0;
  /// Same difference in absolute discrete L2.
  double pressure_path_abs_max = 0.0;
  double led_int_max = 0.0, led_ext_max = 0.0;
  bool led_flagged = false;
  double corollary_max[5] = {0, 0, 0, 0, 0};
  double shell_max = 0.0;

  /// Base energy balance, accumulated along the Runge-Kutta stages.
  double energy0 = 0.0, energy_final = 0.0;
  double flux_integral = 0.0, dissipation_integral = 0.0;
  /// |E(T) + dissipation - E(0) - flux| / E(0), 0 when E(0) = 0.
  double balance_residual = 0.0;

  std::optional<State> final_state;
  int steps = 0;
  double dt = 0.0;
  bool blew_up = false;
  double failure_time = 0.0;
  std::string failure;

  bool residuals_ok() const;
  int exit_code() const { return blew_up ? 2 : 0; }
};

RunResult run_simulation(const RunConfig& cfg, const RunOptions& opt = {});

struct SweepMember {
  double nu = 0.0;
  RunResult result;
  /// ||U_nu(T) - U_0(T)|| when a nu = 0 member exists, else -1.
  double diff_from_inviscid = -1.0;
};

struct SweepReport {
  std::vector<SweepMember> members;
  /// Smallest C' that works for every member, and whether it is within the bound.
  double uniform_c = 0.0;
  bool uniform_pass = false;
  /// max / min over members of the per-member LED maxima.
  double led_int_spread = 0.0, led_ext_spread = 0.0;
  bool any_blowup = false;
  int exit_code() const { return any_blowup ? 2 : (uniform_pass ? 0 : 1); }
};

/// Runs every viscosity from the same initial data on up to `threads` threads.
SweepReport run_sweep(const RunConfig& cfg, const std::vector<double>& nus, const RunOptions& opt = {},
                      int threads = 1);

/// Null-condition check of the configured model. Returns the process exit code.
int run_nullcheck(const RunConfig& cfg, std::ostream& out);
/// Hardy and radial Sobolev batteries. Returns the process exit code.
int run_inequalities(const RunConfig& cfg, std::ostream& out);
/// Prints the contents of a snapshot. Returns the process exit code.
int inspect_snapshot(const std::string& path, std::ostream& out);

std::string summary_text(const RunResult& r);
std::string sweep_text(const SweepReport& s);

}  // namespace vela
