// Command-line front end: builds solitary waves of the coupled
// Schroedinger-Boussinesq system, certifies the spectral/Hessian stability
// conditions, and runs perturbation experiments. Exit codes: 0 success,
// 1 numerical failure (domain/blowup), 2 usage.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <iostream>
#include <string>

#include "sbwave/evolve.hpp"
#include "sbwave/functionals.hpp"
#include "sbwave/hform.hpp"
#include "sbwave/io.hpp"
#include "sbwave/operators.hpp"
#include "sbwave/orbit.hpp"
#include "sbwave/params.hpp"
#include "sbwave/profile.hpp"

namespace {

using sbwave::io::format_g17;
using json = nlohmann::ordered_json;

struct Options {
  double alpha = 1.0;
  double beta = 3.0;
  double gamma = 0.0;
  bool gamma_given = false;
  bool derive_gamma = false;
  double omega = -0.05;
  double v = 0.0;

  long grid_points = 2048;
  bool grid_points_given = false;
  double half_width = 0.0;

  double dt = 1e-3;
  double t_end = -1.0;
  long record_every = 100;
  std::string scheme = "strang";
  std::uint64_t seed = 12345;
  std::string out;
  std::string snapshot_out;
  long snapshot_every = 0;
  std::string format = "json";

  double omega_min = 0.0, omega_max = 0.0;
  bool omega_range_given = false;
  double v_min = 0.0, v_max = 0.0;
  bool v_range_given = false;
  long steps = 50;

  std::string perturb = "amp";
  double perturb_size = 0.01;
  double bump_center = 0.0;
  double bump_width = 1.0;
  int eigen_k = 3;
};

struct Setup {
  sbwave::PhysParams<double> phys;
  sbwave::WaveParams<double> wave;
  sbwave::DerivedScales<double> scales;
  sbwave::Grid<double> grid;
  sbwave::GammaMode mode{sbwave::GammaMode::derive};
};

Setup resolve_setup(const Options& opt) {
  Setup s;
  s.phys = {opt.alpha, opt.beta, opt.gamma};
  s.wave = {opt.omega, opt.v};
  s.mode = (opt.gamma_given && !opt.derive_gamma) ? sbwave::GammaMode::force
                                                  : sbwave::GammaMode::derive;
  s.scales = sbwave::derive_scales(s.phys, s.wave);
  s.phys = sbwave::effective_phys(s.phys, s.scales, s.mode);
  if (opt.half_width > 0.0 || opt.grid_points_given) {
    const double half = opt.half_width > 0.0
                            ? opt.half_width
                            : std::ceil(40.0 / std::sqrt(s.scales.sigma));
    long n = 1;
    while (n < opt.grid_points) n *= 2;
    s.grid = sbwave::make_grid_manual(half, n);
  } else {
    s.grid = sbwave::make_grid(s.scales.sigma, opt.grid_points);
  }
  return s;
}

json manifest_base(const std::string& command, const Options& opt, const Setup& s) {
  json m;
  m["command"] = command;
  m["alpha"] = s.phys.alpha;
  m["beta"] = s.phys.beta;
  m["gamma"] = s.phys.gamma;
  m["gamma_mode"] = s.mode == sbwave::GammaMode::derive ? "derive" : "force";
  m["gamma_star"] = sbwave::compatible_gamma(s.phys, s.scales);
  m["omega"] = s.wave.omega;
  m["v"] = s.wave.v;
  m["sigma"] = s.scales.sigma;
  m["eta"] = s.scales.eta;
  m["grid"] = {{"half_width", s.grid.half_width},
               {"n_points", s.grid.n_points},
               {"spacing", s.grid.spacing}};
  m["dt"] = opt.dt;
  m["t_end"] = opt.t_end;
  m["record_every"] = opt.record_every;
  m["scheme"] = opt.scheme;
  m["seed"] = opt.seed;
  m["out"] = opt.out;
  return m;
}

void write_manifest(const std::string& out_path, const json& manifest) {
  sbwave::io::write_text(out_path + ".manifest.json", manifest.dump(2) + "\n");
}

sbwave::IntegratorConfig<double> integrator_config(const Options& opt) {
  sbwave::IntegratorConfig<double> cfg;
  cfg.dt = opt.dt;
  cfg.record_every = static_cast<int>(opt.record_every);
  if (opt.scheme == "strang")
    cfg.scheme = sbwave::Scheme::strang;
  else if (opt.scheme == "rk4")
    cfg.scheme = sbwave::Scheme::rk4;
  else
    throw CLI::ValidationError("--scheme", "must be strang or rk4");
  return cfg;
}

int cmd_wave(const Options& opt) {
  const Setup s = resolve_setup(opt);
  const auto profile = sbwave::sample_profile(s.phys, s.wave, s.scales, s.grid);
  const std::string out = opt.out.empty() ? "profile.csv" : opt.out;
  sbwave::io::write_profile_csv(out, s.grid, profile);
  write_manifest(out, manifest_base("wave", opt, s));
  std::cout << "wave: sigma=" << format_g17(s.scales.sigma)
            << " eta=" << format_g17(s.scales.eta)
            << " peak eps_hat=" << format_g17(s.scales.c1)
            << " -> " << out << "\n";
  return 0;
}

int cmd_residual(const Options& opt) {
  const Setup s = resolve_setup(opt);
  const auto profile = sbwave::sample_profile(s.phys, s.wave, s.scales, s.grid);
  const auto rep = sbwave::stationary_residual(profile, s.phys, s.wave, s.grid);
  const double gamma_star = sbwave::compatible_gamma(s.phys, s.scales);
  std::cout << "r_nls = " << format_g17(rep.r_nls) << "\n"
            << "r_bsq = " << format_g17(rep.r_bsq) << "\n"
            << "r_grad = " << format_g17(rep.r_grad) << "\n"
            << "gamma = " << format_g17(s.phys.gamma)
            << (s.mode == sbwave::GammaMode::derive ? " (derived)" : " (forced)")
            << "; compatible gamma* = " << format_g17(gamma_star) << "\n";
  if (!opt.out.empty()) {
    json rj;
    rj["r_nls"] = rep.r_nls;
    rj["r_bsq"] = rep.r_bsq;
    rj["r_grad"] = rep.r_grad;
    rj["gamma"] = s.phys.gamma;
    rj["gamma_star"] = gamma_star;
    sbwave::io::write_text(opt.out, rj.dump(2) + "\n");
    write_manifest(opt.out, manifest_base("residual", opt, s));
  }
  return 0;
}

int cmd_spectrum(const Options& opt) {
  const Setup s = resolve_setup(opt);
  const auto profile = sbwave::sample_profile(s.phys, s.wave, s.scales, s.grid);
  const auto reports =
      sbwave::spectral_reports(profile, s.phys, s.scales, s.grid, opt.eigen_k);
  for (const auto& r : reports) {
    std::cout << sbwave::operator_name(r.kind) << ": eigenvalues [";
    for (size_t i = 0; i < r.lowest_eigenvalues.size(); ++i)
      std::cout << (i ? ", " : "") << format_g17(r.lowest_eigenvalues[i]);
    std::cout << "] negative_count=" << r.negative_count
              << " kernel_residual=" << format_g17(r.kernel_residual)
              << " essential_edge=" << format_g17(r.essential_edge) << "\n";
  }
  const std::string out = opt.out.empty() ? "spectrum.jsonl" : opt.out;
  sbwave::io::write_spectral_jsonl(out, reports);
  write_manifest(out, manifest_base("spectrum", opt, s));
  return 0;
}

int cmd_hessian(const Options& opt) {
  const sbwave::PhysParams<double> phys{opt.alpha, opt.beta, opt.gamma};
  const sbwave::WaveParams<double> wave{opt.omega, opt.v};
  const auto closed = sbwave::d_hessian(phys, wave, sbwave::HessianMode::closed_form);
  const auto fd = sbwave::d_hessian(phys, wave, sbwave::HessianMode::finite_difference);
  const auto verdict = sbwave::check_stability_criterion(phys, wave);
  std::cout << "d_omega = " << format_g17(closed.d_omega)
            << "  d_v = " << format_g17(closed.d_v) << "\n"
            << "d_oo = " << format_g17(closed.d_oo) << "  d_ov = " << format_g17(closed.d_ov)
            << "  d_vo = " << format_g17(closed.d_vo) << "  d_vv = " << format_g17(closed.d_vv)
            << "\n"
            << "det = " << format_g17(closed.det) << "  p = " << closed.p_dpp
            << (closed.degenerate ? " (degenerate)" : "") << "\n"
            << "finite-difference det = " << format_g17(fd.det) << "\n"
            << "verdict: " << (verdict.stable_certified ? "certified stable" : "not certified")
            << "\n";
  if (!opt.out.empty()) {
    const Setup s = resolve_setup(opt);
    json hj;
    hj["d_omega"] = closed.d_omega;
    hj["d_v"] = closed.d_v;
    hj["d_oo"] = closed.d_oo;
    hj["d_ov"] = closed.d_ov;
    hj["d_vo"] = closed.d_vo;
    hj["d_vv"] = closed.d_vv;
    hj["det"] = closed.det;
    hj["p"] = closed.p_dpp;
    hj["degenerate"] = closed.degenerate;
    hj["det_finite_difference"] = fd.det;
    hj["certified_stable"] = verdict.stable_certified;
    sbwave::io::write_text(opt.out, hj.dump(2) + "\n");
    write_manifest(opt.out, manifest_base("hessian", opt, s));
  }
  return 0;
}

int cmd_region(const Options& opt) {
  const sbwave::PhysParams<double> phys{opt.alpha, opt.beta, opt.gamma};
  const double omin = opt.omega_range_given ? opt.omega_min : opt.omega;
  const double omax = opt.omega_range_given ? opt.omega_max : opt.omega;
  const double vmin = opt.v_range_given ? opt.v_min : opt.v;
  const double vmax = opt.v_range_given ? opt.v_max : opt.v;
  const long n_omega = omin == omax ? 1 : opt.steps;
  const long n_v = vmin == vmax ? 1 : opt.steps;
  const auto rows = sbwave::region_scan(phys, omin, omax, vmin, vmax, n_omega, n_v);
  const std::string out = opt.out.empty() ? "region.csv" : opt.out;
  sbwave::io::write_region_csv(out, rows);

  json m;
  m["command"] = "region";
  m["alpha"] = phys.alpha;
  m["beta"] = phys.beta;
  m["gamma"] = phys.gamma;
  m["omega_min"] = omin;
  m["omega_max"] = omax;
  m["v_min"] = vmin;
  m["v_max"] = vmax;
  m["steps_omega"] = n_omega;
  m["steps_v"] = n_v;
  m["seed"] = opt.seed;
  m["out"] = out;
  write_manifest(out, m);
  long stable = 0;
  for (const auto& r : rows) stable += r.stable ? 1 : 0;
  std::cout << "region: " << rows.size() << " points, " << stable
            << " certified stable -> " << out << "\n";
  return 0;
}

std::string snapshot_name(const std::string& base, long index) {
  char tag[24];
  std::snprintf(tag, sizeof(tag), "_%06ld", index);
  const size_t slash = base.rfind('/');
  const size_t dot = base.rfind('.');
  const bool has_ext = dot != std::string::npos &&
                       (slash == std::string::npos || dot > slash);
  return has_ext ? base.substr(0, dot) + tag + base.substr(dot) : base + tag;
}

int cmd_evolve(const Options& opt) {
  const Setup s = resolve_setup(opt);
  const double t_end = opt.t_end > 0 ? opt.t_end : 20.0;
  const auto profile = sbwave::sample_profile(s.phys, s.wave, s.scales, s.grid);
  const auto cfg = integrator_config(opt);
  Options eff = opt;
  eff.t_end = t_end;

  json m = manifest_base("evolve", eff, s);
  m["snapshot_out"] = opt.snapshot_out;
  m["snapshot_every"] = opt.snapshot_every;

  sbwave::State<double> state = sbwave::init_state(profile, s.grid);
  sbwave::ConservationLog<double> log;
  log.initial = sbwave::invariant_triple(state.eps, state.n, state.w, s.phys, s.grid);
  log.samples.emplace_back(state.t, log.initial);

  sbwave::Integrator<double> integ(s.grid, s.phys, cfg);
  const long n_steps = std::lround(t_end / cfg.dt);
  long snapshot_index = 0;
  for (long i = 1; i <= n_steps; ++i) {
    integ.step(state);
    if (i % cfg.record_every == 0 || i == n_steps)
      log.samples.emplace_back(
          state.t, sbwave::invariant_triple(state.eps, state.n, state.w, s.phys, s.grid));
    if (!opt.snapshot_out.empty() && opt.snapshot_every > 0 &&
        i % opt.snapshot_every == 0) {
      const std::string snap = snapshot_name(opt.snapshot_out, snapshot_index++);
      sbwave::io::write_state_csv(snap, state);
      write_manifest(snap, m);
    }
  }
  const auto drift = sbwave::conservation_drift(log);

  const std::string out = opt.out.empty() ? "conservation.csv" : opt.out;
  sbwave::io::write_conservation_csv(out, log);
  write_manifest(out, m);
  if (!opt.snapshot_out.empty()) {
    sbwave::io::write_state_csv(opt.snapshot_out, state);
    write_manifest(opt.snapshot_out, m);
  }
  std::cout << "evolve: t=" << format_g17(state.t)
            << " drift(E)=" << format_g17(drift[0]) << " drift(Q1)=" << format_g17(drift[1])
            << " drift(Q2)=" << format_g17(drift[2]) << " -> " << out << "\n";
  return 0;
}

int cmd_orbit(const Options& opt) {
  const Setup s = resolve_setup(opt);
  const double t_end = opt.t_end > 0 ? opt.t_end : 50.0;
  sbwave::PerturbSpec<double> perturb;
  if (opt.perturb == "amp")
    perturb.kind = sbwave::PerturbKind::amplitude;
  else if (opt.perturb == "bump")
    perturb.kind = sbwave::PerturbKind::bump;
  else if (opt.perturb == "noise")
    perturb.kind = sbwave::PerturbKind::noise;
  else
    throw CLI::ValidationError("--perturb", "must be amp, bump or noise");
  perturb.amount = opt.perturb_size;
  perturb.center = opt.bump_center;
  perturb.width = opt.bump_width;
  perturb.seed = opt.seed;

  const auto cfg = integrator_config(opt);
  const auto report =
      sbwave::stability_experiment(s.phys, s.wave, perturb, t_end, cfg, &s.grid);

  const std::string out =
      opt.out.empty() ? (opt.format == "csv" ? "orbit.csv" : "orbit.json") : opt.out;
  if (opt.format == "csv")
    sbwave::io::write_stability_csv(out, report);
  else
    sbwave::io::write_stability_json(out, report);
  Options eff = opt;
  eff.t_end = t_end;
  json m = manifest_base("orbit", eff, s);
  m["perturb"] = opt.perturb;
  m["perturb_size"] = opt.perturb_size;
  m["bump_center"] = opt.bump_center;
  m["bump_width"] = opt.bump_width;
  m["format"] = opt.format;
  write_manifest(out, m);
  std::cout << "orbit: delta0=" << format_g17(report.perturbation_size)
            << " max_distance=" << format_g17(report.max_distance)
            << " certified=" << (report.certified_region ? "yes" : "no") << " -> " << out
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  CLI::App app{"solitary waves of the Schroedinger-Boussinesq system: construction, "
               "spectral certification, evolution and orbital tracking"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "flat key = value configuration file");
  app.allow_config_extras(CLI::config_extras_mode::error);

  app.add_option("--alpha", opt.alpha, "fourth-order dispersion coefficient (> 0)");
  app.add_option("--beta", opt.beta, "Boussinesq nonlinearity coefficient (> 0)");
  auto* gamma_opt = app.add_option("--gamma", opt.gamma,
                                   "cubic coefficient; forces gamma unless --derive-gamma");
  app.add_flag("--derive-gamma", opt.derive_gamma,
               "use the compatible gamma* regardless of --gamma");
  app.add_option("--omega", opt.omega, "temporal frequency");
  app.add_option("--v", opt.v, "wave speed");
  auto* gp_opt = app.add_option("--grid-points", opt.grid_points, "minimum grid size");
  app.add_option("--half-width", opt.half_width, "override half width (0 = automatic)");
  app.add_option("--dt", opt.dt, "time step");
  app.add_option("--t-end", opt.t_end, "final time (default 20 evolve, 50 orbit)");
  app.add_option("--record-every", opt.record_every, "sampling cadence in steps");
  app.add_option("--scheme", opt.scheme, "strang or rk4");
  app.add_option("--seed", opt.seed, "seed for perturbations");
  app.add_option("--out", opt.out, "output path");

  app.add_subcommand("wave", "sample the closed-form profile and export CSV");
  app.add_subcommand("residual", "stationary and first-variation residuals");
  auto* spectrum = app.add_subcommand("spectrum", "discretized operator spectra");
  spectrum->add_option("--k", opt.eigen_k, "eigenvalues per operator (<= 10)");
  app.add_subcommand("hessian", "classify the 2x2 Hessian of d(omega, v)");
  auto* region = app.add_subcommand("region", "scan the (omega, v) parameter plane");
  auto* omin = region->add_option("--omega-min", opt.omega_min, "scan lower omega");
  auto* omax = region->add_option("--omega-max", opt.omega_max, "scan upper omega");
  auto* vmin = region->add_option("--v-min", opt.v_min, "scan lower v");
  auto* vmax = region->add_option("--v-max", opt.v_max, "scan upper v");
  region->add_option("--steps", opt.steps, "samples per ranged axis");
  auto* evolve = app.add_subcommand("evolve", "integrate and track invariants");
  evolve->add_option("--snapshot-out", opt.snapshot_out, "final state CSV path");
  evolve->add_option("--snapshot-every", opt.snapshot_every,
                     "also write a numbered snapshot every N steps (0 = off)");
  auto* orbit = app.add_subcommand("orbit", "perturbation experiment");
  orbit->add_option("--perturb", opt.perturb, "amp | bump | noise");
  orbit->add_option("--perturb-size", opt.perturb_size, "relative perturbation size");
  orbit->add_option("--bump-center", opt.bump_center, "bump center");
  orbit->add_option("--bump-width", opt.bump_width, "bump width");
  orbit->add_option("--format", opt.format, "json | csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }

  opt.gamma_given = gamma_opt->count() > 0;
  opt.grid_points_given = gp_opt->count() > 0;
  opt.omega_range_given = omin->count() > 0 || omax->count() > 0;
  opt.v_range_given = vmin->count() > 0 || vmax->count() > 0;

  try {
    if (app.got_subcommand("wave")) return cmd_wave(opt);
    if (app.got_subcommand("residual")) return cmd_residual(opt);
    if (app.got_subcommand("spectrum")) return cmd_spectrum(opt);
    if (app.got_subcommand("hessian")) return cmd_hessian(opt);
    if (app.got_subcommand("region")) return cmd_region(opt);
    if (app.got_subcommand("evolve")) return cmd_evolve(opt);
    if (app.got_subcommand("orbit")) return cmd_orbit(opt);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const sbwave::BlowupDetected& e) {
    std::cerr << "numerical failure: " << e.what() << " at t = " << e.t << "\n";
    return 1;
  } catch (const std::runtime_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
