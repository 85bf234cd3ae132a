#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace vela {

/// Every knob of a run. Serialised as an INI file with sections
/// [grid] [material] [solver] [data] [diagnostics] [output] [sweep] [checks].
struct RunConfig {
  // [grid]
  int n = 64;
  double L = 6.283185307179586;

  // [material]
  std::string model = "builtin";
  double c1 = 1.0;
  double nu = 0.0;

  // [solver]
  /// 0 selects the CFL step 0.5 * spacing / c1.
  double dt = 0.0;
  /// 0 selects the cone cap.
  double T = 0.0;
  bool dealias = true;
  bool linear = false;
  /// Steps between CSV rows.
  int cadence = 4;
  /// CSV rows between snapshots; 0 writes only the initial and final states.
  int snapshot_every = 0;

  // [data]
  std::uint64_t seed = 1;
  double epsilon = 0.01;
  /// Gaussian width of the initial blobs as a fraction of L. Coarse grids
  /// need wider blobs to keep the initial det residual small.
  double width = 0.1;

  // [diagnostics]
  double m = 5.0;
  double delta = 0.5;
  double theorem_cmax = 4.0;
  double div_threshold = 1e-10;
  double det_threshold = 1e-6;
  double curl_threshold = 1e-6;
  /// Full (sigma, theta) = (2, 1) hierarchy, weighted norms and LED at every row.
  bool full_diagnostics = true;

  // [output]
  std::string dir = "vela_out";

  // [sweep]
  std::vector<double> nu_list{0.0, 1e-3, 1e-2, 1e-1};

  // [checks]
  int null_samples = 1000;
  double null_threshold = 1e-6;
  int hardy_count = 100;
  int sobolev_count = 50;
  double sobolev_lambda = 1.0;
  int inequality_n = 32;
  bool null_check = false;

  double spacing() const { return 2.0 * L / n; }
  /// Largest horizon keeping the cone r <= L/4 + c1 T inside r <= 0.8 L.
  double cone_cap() const { return (0.8 * L - 0.25 * L) / c1; }
  double horizon() const { return T > 0.0 ? T : cone_cap(); }
  int steps() const;
  /// Step actually used: the requested (or CFL) step shrunk so it divides T.
  double step_size() const;

  /// Throws ConfigError with an explanatory message.
  void validate() const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string write_config(const RunConfig& c);
void save_config(const RunConfig& c, const std::string& path);
/// Applies "section.key=value".
void apply_override(RunConfig& c, const std::string& assignment);
std::vector<std::string> config_keys();

}  // namespace vela
