#include "vela/run.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "vela/error.hpp"
#include "vela/snapshot.hpp"

namespace vela {

namespace {

std::string num(double v) { return format_double(v); }

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p);
  if (!out) throw Error("cannot write '" + p.string() + "'");
  out << text;
}

void save_state(const std::filesystem::path& p, const State& s) {
  Snapshot snap;
  snap.n = s.grid().n();
  snap.L = s.grid().L();
  snap.t = s.t;
  snap.fields.push_back(to_snapshot_field("hdot", s.hdot));
  snap.fields.push_back(to_snapshot_field("vdot", s.vdot));
  write_snapshot(p.string(), snap);
}

std::string snapshot_name(int row) {
  std::string s = std::to_string(row);
  return "snapshot_" + std::string(6 - std::min<std::size_t>(6, s.size()), '0') + s + ".vela";
}

double safe_ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

}  // namespace

bool RunResult::residuals_ok() const {
  return max_residuals.div_v <= config.div_threshold && max_residuals.det <= config.det_threshold &&
         max_residuals.curl <= config.curl_threshold;
}

RunResult run_simulation(const RunConfig& cfg, const RunOptions& opt) {
  cfg.validate();
  RunResult res;
  res.config = cfg;
  const Grid g(cfg.n, cfg.L);
  MaterialParams mp;
  mp.c1 = cfg.c1;
  mp.c2 = 1.0;
  mp.nu = cfg.nu;
  const auto model = make_model(cfg.model, mp);

  InitialDataOptions io;
  io.linearized = cfg.linear;
  io.width = cfg.width;
  State state = opt.initial ? *opt.initial : generate_initial_data(g, cfg.seed, cfg.epsilon, *model, io);
  state.hdot.check_grid(g);

  res.steps = cfg.steps();
  res.dt = cfg.step_size();
  SolverConfig sc;
  sc.dt = res.dt;
  sc.dealias = cfg.dealias;
  sc.linear = cfg.linear;
  sc.track_energy = true;
  Solver solver(g, *model, sc);
  Spectral& sp = solver.spectral();

  std::filesystem::path dir(cfg.dir);
  std::ofstream csv;
  if (opt.write_files) {
    std::filesystem::create_directories(dir);
    save_config(cfg, (dir / "config.ini").string());
    csv.open(dir / "timeseries.csv");
    if (!csv) throw Error("cannot write the time series under '" + cfg.dir + "'");
    csv << csv_header() << '\n';
  }

  double d_low = 0.0, d_high = 0.0, prev_rate_low = 0.0, prev_rate_high = 0.0, prev_t = state.t;
  res.energy0 = base_energy(state, *model, cfg.linear);

  auto sample = [&](const State& s, bool final) {
    EnergyReport row;
    row.t = s.t;
    const FieldPair dudt = solver.time_derivative(s);
    HierarchyOptions ho;
    ho.sigma = 2;
    ho.theta = 1;
    ho.dissipation = true;
    ho.weighted_norms = cfg.full_diagnostics;
    ho.at_identity = cfg.linear;
    ho.m = cfg.m;
    const Hierarchy h = hierarchy(sp, s, dudt, *model, ho);
    row.e00 = h.energy[0][0];
    row.e10 = h.energy[1][0];
    row.e20 = h.energy[2][0];
    row.e21 = h.energy[2][1];
    if (!std::isfinite(row.e21)) throw BlowUpError("non-finite energy", s.t);

    const double rate_low = h.dissipation[2][1], rate_high = h.dissipation[2][0];
    if (!res.rows.empty()) {
      d_low += 0.5 * (prev_rate_low + rate_low) * (s.t - prev_t);
      d_high += 0.5 * (prev_rate_high + rate_high) * (s.t - prev_t);
    }
    prev_rate_low = rate_low;
    prev_rate_high = rate_high;
    prev_t = s.t;
    row.dissip_int = d_low;
    res.history.push_back({s.t, row.e21, row.e20, d_low, d_high});

    row.residuals = constraint_residuals(sp, s);
    if (res.rows.empty()) res.initial_residuals = row.residuals;
    res.max_residuals.div_v = std::max(res.max_residuals.div_v, row.residuals.div_v);
    res.max_residuals.det = std::max(res.max_residuals.det, row.residuals.det);
    res.max_residuals.curl = std::max(res.max_residuals.curl, row.residuals.curl);
    row.X = h.X;
    row.Xi = h.Xi;
    row.Psi = h.Psi;

    NonlinearTerms terms(g);
    if (!cfg.linear) terms = nonlinear_rhs(sp, s, *model, cfg.dealias);
    const VectorField gp = pressure_gradient(sp, s, terms.forcing);
    const double gpn = l2_norm(gp);
    row.p_ratio = safe_ratio(gpn, l2_norm(terms.nv) + l2_norm(terms.mh));
    res.pressure_ratio_max = std::max(res.pressure_ratio_max, row.p_ratio);
    if (!cfg.linear) {
      const VectorField gp2 = pressure_gradient_poisson(sp, terms, cfg.c1);
      const double diff = l2_norm(gp - gp2);
      res.pressure_path_abs_max = std::max(res.pressure_path_abs_max, diff);
      res.pressure_path_diff_max = std::max(res.pressure_path_diff_max, safe_ratio(diff, gpn));
    }

    if (cfg.full_diagnostics) {
      const VectorField force_v = terms.forcing - gp;
      const DecayEntry d = led_ratio(sp, s, dudt, terms.nh, force_v, cfg.nu, cfg.m);
      res.led.push_back(d);
      row.led_int = d.int_ratio;
      row.led_ext = d.ext_ratio;
      res.led_int_max = std::max(res.led_int_max, d.int_ratio);
      res.led_ext_max = std::max(res.led_ext_max, d.ext_ratio);
      res.led_flagged = res.led_flagged || (d.int_flag && d.int_lhs > 0.0) || (d.ext_flag && d.ext_lhs > 0.0);
      row.sob = corollary_monitors(sp, s, terms.mh, h.upsilon_norm_sum, h.X, h.Psi, cfg.m);
      const double sob[5] = {row.sob.sob4, row.sob.sob5, row.sob.sob6, row.sob.sob7, row.sob.sob8};
      for (int i = 0; i < 5; ++i) res.corollary_max[i] = std::max(res.corollary_max[i], sob[i]);
    }
    res.shell_max = std::max(res.shell_max, boundary_shell_max(s.pair()));

    const int index = static_cast<int>(res.rows.size());
    res.rows.push_back(row);
    if (opt.write_files) {
      csv << csv_row(row) << '\n';
      if (index == 0 || final || (cfg.snapshot_every > 0 && index % cfg.snapshot_every == 0))
        save_state(dir / snapshot_name(index), s);
    }
    if (opt.log)
      *opt.log << "t = " << num(s.t) << "  E21 = " << num(row.e21) << "  det = " << num(row.residuals.det) << '\n';
  };

  try {
    sample(state, res.steps == 0);
    for (int k = 1; k <= res.steps; ++k) {
      state = solver.step(state);
      if (k % cfg.cadence == 0 || k == res.steps) sample(state, k == res.steps);
    }
  } catch (const BlowUpError& e) {
    res.blew_up = true;
    res.failure_time = e.time();
    res.failure = e.what();
  } catch (const EvaluationError& e) {
    res.blew_up = true;
    res.failure_time = state.t;
    res.failure = e.what();
  }

  res.verdict = theorem_monitor(res.history, cfg.delta, cfg.theorem_cmax);
  if (res.blew_up) {
    res.verdict.blew_up = true;
    res.verdict.failure_time = res.failure_time;
  } else {
    res.energy_final = base_energy(state, *model, cfg.linear);
    res.flux_integral = solver.flux_integral();
    res.dissipation_integral = solver.dissipation_integral();
    res.balance_residual =
        safe_ratio(std::abs(res.energy_final + res.dissipation_integral - res.energy0 - res.flux_integral), res.energy0);
  }
  res.final_state = state;
  if (opt.write_files) write_text(dir / "summary.txt", summary_text(res));
  return res;
}

std::string summary_text(const RunResult& r) {
  const RunConfig& c = r.config;
  std::ostringstream o;
  o << "model = " << c.model << "\nn = " << c.n << "\nL = " << num(c.L) << "\nc1 = " << num(c.c1)
    << "\nnu = " << num(c.nu) << "\nseed = " << c.seed << "\nepsilon = " << num(c.epsilon) << "\nwidth = " << num(c.width)
    << "\nlinear = " << (c.linear ? "true" : "false") << "\nsteps = " << r.steps << "\ndt = " << num(r.dt)
    << "\nT = " << num(c.horizon()) << "\n";
  o << "status = " << (r.blew_up ? "blow-up" : "completed") << "\n";
  if (r.blew_up) o << "failure_time = " << num(r.failure_time) << "\nfailure = " << r.failure << "\n";
  o << "theorem_c_low = " << num(r.verdict.c_low) << "\ntheorem_c_high = " << num(r.verdict.c_high)
    << "\ntheorem_delta = " << num(r.verdict.delta) << "\ntheorem_bound = " << num(r.verdict.bound)
    << "\ntheorem_pass = " << (r.verdict.pass() ? "true" : "false") << "\n";
  o << "div_v_max = " << num(r.max_residuals.div_v) << "\ndet_res_max = " << num(r.max_residuals.det)
    << "\ncurl_res_max = " << num(r.max_residuals.curl) << "\nresiduals_ok = " << (r.residuals_ok() ? "true" : "false")
    << "\n";
  o << "pressure_ratio_max = " << num(r.pressure_ratio_max) << "\npressure_path_diff_max = "
    << num(r.pressure_path_diff_max) << "\npressure_path_abs_max = " << num(r.pressure_path_abs_max) << "\n";
  o << "led_int_max = " << num(r.led_int_max) << "\nled_ext_max = " << num(r.led_ext_max)
    << "\nled_flagged = " << (r.led_flagged ? "true" : "false") << "\n";
  for (int i = 0; i < 5; ++i) o << "sob" << (i + 4) << "_max = " << num(r.corollary_max[i]) << "\n";
  o << "shell_max = " << num(r.shell_max) << "\n";
  o << "energy0 = " << num(r.energy0) << "\nenergy_final = " << num(r.energy_final)
    << "\nflux_integral = " << num(r.flux_integral) << "\ndissipation_integral = " << num(r.dissipation_integral)
    << "\nbalance_residual = " << num(r.balance_residual) << "\n";
  return o.str();
}

SweepReport run_sweep(const RunConfig& cfg, const std::vector<double>& nus, const RunOptions& opt, int threads) {
  if (nus.size() < 2) throw ConfigError("a sweep needs at least two viscosities");
  cfg.validate();
  for (double v : nus)
    if (!(v >= 0.0)) throw ConfigError("viscosities must be >= 0");

  // Shared initial data: generated once, independent of the viscosity.
  const Grid g(cfg.n, cfg.L);
  MaterialParams mp;
  mp.c1 = cfg.c1;
  const auto model = make_model(cfg.model, mp);
  InitialDataOptions io;
  io.linearized = cfg.linear;
  io.width = cfg.width;
  const State initial = opt.initial ? *opt.initial : generate_initial_data(g, cfg.seed, cfg.epsilon, *model, io);

  SweepReport rep;
  rep.members.resize(nus.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < nus.size(); i = next++) {
      RunConfig c = cfg;
      c.nu = nus[i];
      c.dir = (std::filesystem::path(cfg.dir) / ("nu_" + std::to_string(i))).string();
      RunOptions o;
      o.write_files = opt.write_files;
      o.initial = &initial;
      rep.members[i].nu = nus[i];
      rep.members[i].result = run_simulation(c, o);
      if (opt.log) {
        std::lock_guard<std::mutex> lock(log_mutex);
        *opt.log << "nu = " << num(nus[i]) << "  C' = " << num(rep.members[i].result.verdict.c())
                 << (rep.members[i].result.blew_up ? "  blow-up" : "") << '\n';
      }
    }
  };
  const int nt = std::max(1, std::min<int>(threads, static_cast<int>(nus.size())));
  if (nt == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  const SweepMember* inviscid = nullptr;
  for (const auto& m : rep.members)
    if (m.nu == 0.0 && !m.result.blew_up) inviscid = &m;
  double int_lo = std::numeric_limits<double>::infinity(), int_hi = 0.0, ext_lo = std::numeric_limits<double>::infinity(), ext_hi = 0.0;
  rep.uniform_c = 0.0;
  for (auto& m : rep.members) {
    rep.any_blowup = rep.any_blowup || m.result.blew_up;
    rep.uniform_c = std::max(rep.uniform_c, m.result.verdict.c());
    int_lo = std::min(int_lo, m.result.led_int_max);
    int_hi = std::max(int_hi, m.result.led_int_max);
    ext_lo = std::min(ext_lo, m.result.led_ext_max);
    ext_hi = std::max(ext_hi, m.result.led_ext_max);
    if (inviscid && !m.result.blew_up)
      m.diff_from_inviscid = l2_norm(m.result.final_state->pair() - inviscid->result.final_state->pair());
  }
  rep.led_int_spread = safe_ratio(int_hi, int_lo);
  rep.led_ext_spread = safe_ratio(ext_hi, ext_lo);
  rep.uniform_pass = !rep.any_blowup && rep.uniform_c <= cfg.theorem_cmax;

  if (opt.write_files) {
    std::filesystem::create_directories(cfg.dir);
    std::string csv = "nu,c_low,c_high,c,led_int_max,led_ext_max,pressure_ratio_max,diff_from_inviscid,blew_up\n";
    for (const auto& m : rep.members) {
      const RunResult& r = m.result;
      csv += num(m.nu) + "," + num(r.verdict.c_low) + "," + num(r.verdict.c_high) + "," + num(r.verdict.c()) + "," +
             num(r.led_int_max) + "," + num(r.led_ext_max) + "," + num(r.pressure_ratio_max) + "," +
             num(m.diff_from_inviscid) + "," + (r.blew_up ? "1" : "0") + "\n";
    }
    write_text(std::filesystem::path(cfg.dir) / "sweep.csv", csv);
    write_text(std::filesystem::path(cfg.dir) / "sweep_summary.txt", sweep_text(rep));
  }
  return rep;
}

std::string sweep_text(const SweepReport& s) {
  std::ostringstream o;
  o << "members = " << s.members.size() << "\nuniform_c = " << num(s.uniform_c)
    << "\nuniform_pass = " << (s.uniform_pass ? "true" : "false") << "\nled_int_spread = " << num(s.led_int_spread)
    << "\nled_ext_spread = " << num(s.led_ext_spread) << "\nany_blowup = " << (s.any_blowup ? "true" : "false")
    << "\n";
  for (const auto& m : s.members) {
    o << "nu " << num(m.nu) << ": c = " << num(m.result.verdict.c());
    if (m.diff_from_inviscid >= 0.0) {
      o << ", |U - U_inviscid| = " << num(m.diff_from_inviscid);
      if (m.nu > 0.0) o << ", per nu T = " << num(m.diff_from_inviscid / (m.nu * m.result.config.horizon()));
    }
    if (m.result.blew_up) o << ", blow-up at t = " << num(m.result.failure_time);
    o << "\n";
  }
  return o.str();
}

int run_nullcheck(const RunConfig& cfg, std::ostream& out) {
  MaterialParams mp;
  mp.c1 = cfg.c1;
  mp.nu = cfg.nu;
  const auto model = make_model(cfg.model, mp);
  const NullReport r =
      null_condition_check(*model, static_cast<std::size_t>(cfg.null_samples), cfg.seed, cfg.null_threshold);
  auto vec = [](const Vec3& v) { return "(" + num(v[0]) + ", " + num(v[1]) + ", " + num(v[2]) + ")"; };
  out << "model = " << cfg.model << "\nsamples = " << r.samples << "\nthreshold = " << num(r.threshold)
      << "\nmax_residual = " << num(r.max_total) << "\nmax_residual_derivative_part = " << num(r.max_derivative)
      << "\nmax_residual_delta_part = " << num(r.max_delta) << "\nworst_omega = " << vec(r.worst_omega)
      << "\nworst_xi1 = " << vec(r.worst_xi1) << "\nworst_xi2 = " << vec(r.worst_xi2)
      << "\nworst_xi3 = " << vec(r.worst_xi3) << "\nstep_converged = " << (r.converged ? "true" : "false")
      << "\nstep_difference = " << num(r.richardson_diff) << "\nresult = " << (r.pass() ? "PASS" : "FAIL") << "\n";
  return r.pass() ? 0 : 1;
}

int run_inequalities(const RunConfig& cfg, std::ostream& out) {
  const Grid g(cfg.inequality_n, cfg.L);
  Spectral sp(g);
  const double hardy_bound = 2.0 + 1e-6;
  const BatteryResult h = hardy_battery(sp, cfg.seed, static_cast<std::size_t>(cfg.hardy_count));
  const BatteryResult s = sobolev_battery(sp, cfg.seed, static_cast<std::size_t>(cfg.sobolev_count), cfg.sobolev_lambda);
  bool sob_finite = true;
  for (double v : s.ratios) sob_finite = sob_finite && std::isfinite(v);
  const bool hardy_ok = h.max_ratio <= hardy_bound;
  out << "grid = " << cfg.inequality_n << "\nhardy_count = " << h.ratios.size() << "\nhardy_max = " << num(h.max_ratio)
      << "\nhardy_worst_index = " << h.worst << "\nhardy_bound = " << num(hardy_bound)
      << "\nhardy = " << (hardy_ok ? "PASS" : "FAIL") << "\nsobolev_count = " << s.ratios.size()
      << "\nsobolev_lambda = " << num(cfg.sobolev_lambda) << "\nsobolev_constant = " << num(s.max_ratio)
      << "\nsobolev_worst_index = " << s.worst << "\nsobolev = " << (sob_finite ? "PASS" : "FAIL") << "\n";
  return hardy_ok && sob_finite ? 0 : 1;
}

int inspect_snapshot(const std::string& path, std::ostream& out) {
  const Snapshot snap = read_snapshot(path);
  out << "n = " << snap.n << "\nL = " << num(snap.L) << "\nt = " << num(snap.t) << "\n";
  const double vol = snap.grid().cell_volume();
  for (const auto& f : snap.fields) {
    double mx = 0.0, sq = 0.0;
    for (double v : f.data) {
      mx = std::max(mx, std::abs(v));
      sq += v * v;
    }
    out << "field " << f.name << ": components = " << f.components << ", max = " << num(mx)
        << ", l2 = " << num(std::sqrt(vol * sq)) << "\n";
  }
  bool has_h = false, has_v = false;
  for (const auto& f : snap.fields) {
    has_h = has_h || (f.name == "hdot" && f.components == 9);
    has_v = has_v || (f.name == "vdot" && f.components == 3);
  }
  if (has_h && has_v) {
    State s(snap.grid());
    s.hdot = from_snapshot_field<9>(snap, "hdot");
    s.vdot = from_snapshot_field<3>(snap, "vdot");
    s.t = snap.t;
    Spectral sp(snap.grid());
    const ConstraintResiduals r = constraint_residuals(sp, s);
    const ConstantModel lin{MaterialParams{}};
    out << "div_v_max = " << num(r.div_v) << "\ndet_res_max = " << num(r.det) << "\ncurl_res_max = " << num(r.curl)
        << "\nlinear_energy = " << num(base_energy(s, lin, true)) << "\n";
  }
  return 0;
}

}  // namespace vela
