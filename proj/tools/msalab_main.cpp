// Configuration-driven front end: deterministic experiments, CSV/JSON output.
//
// Exit codes: 0 success, 1 configuration/validation error, 2 numerical
// failure.  Every run writes resolved_config.json and version.txt next to its
// artifacts; identical config + seed produce byte-identical outputs at any
// thread count.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "msalab/config.hpp"
#include "msalab/rng.hpp"
#include "msalab/msa.hpp"
#include "msalab/report.hpp"
#include "msalab/stats.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace msalab;

namespace {

struct Ctx {
  config::RunConfig cfg;
  fs::path out;
  dynamics::FrequencyMatrix freqs;
  randelette::RandeletteEnsemble ens;
  lattice::ScaleSchedule sched;
};

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << text;
}

stats::McParams mc_params(const Ctx& ctx) {
  stats::McParams mc;
  mc.samples = ctx.cfg.experiment.samples;
  mc.seed_base = ctx.cfg.ensemble.seed;
  mc.threads = ctx.cfg.experiment.threads;
  return mc;
}

int run_dynamics_check(Ctx& ctx) {
  const auto& x = ctx.cfg.experiment;
  const auto usr = dynamics::usr_certificate(ctx.freqs, x.usr_exponent_a, x.usr_range);
  const auto div = dynamics::div_certificate(ctx.freqs, x.div_range, x.div_trials,
                                             ctx.cfg.ensemble.seed);
  json j;
  j["usr"] = {{"exponent_a", usr.exponent_a},
              {"range", usr.range},
              {"c_min", usr.c_min},
              {"four_c_min", 4.0 * usr.c_min},
              {"argmin", usr.argmin},
              {"positive", usr.c_min > 0.0}};
  j["div"] = {{"range", div.range},
              {"max_ratio", div.max_ratio},
              {"isometry", div.isometry},
              {"exponent_a", div.exponent_a},
              {"constant_c", div.constant_c}};
  if (usr.c_min > 0.0) {
    json table = json::array();
    for (std::int64_t L : {2, 4, 8, 16, 32, 64}) {
      const auto sep = randelette::separation_generation(L, usr.exponent_a, usr.c_min);
      table.push_back({{"L", L}, {"n_raw", sep.n_raw}, {"n_min", sep.n_min}});
    }
    j["separation_generations"] = table;
  }
  write_text(ctx.out / "dynamics.json", j.dump(2) + "\n");
  return 0;
}

int run_ensemble_inspect(Ctx& ctx) {
  const auto& x = ctx.cfg.experiment;
  const auto theta = stats::sample_theta(ctx.cfg.ensemble.seed, 0);

  // hull values on a uniform omega grid (nu = 1 export)
  if (ctx.ens.nu == 1) {
    std::string csv = "omega,value\n";
    for (int i = 0; i < x.hull_grid; ++i) {
      const double w = static_cast<double>(i) / x.hull_grid;
      csv += report::fmt_g17(w) + "," +
             report::fmt_g17(randelette::hull_eval(ctx.ens, theta,
                                                   dynamics::TorusPoint({w}))) +
             "\n";
    }
    write_text(ctx.out / "hull.csv", csv);
  }

  json j;
  j["tail_bound"] = ctx.ens.tail_bound();
  j["gradient_bound"] = ctx.ens.gradient_bound();

  // coverage and overlap over a grid, all generations
  int worst_overlap = 0;
  bool covered = true;
  for (int n = 0; n <= std::min(ctx.ens.n_max, 20) && covered; ++n) {
    for (int i = 0; i < 2000; ++i) {
      const double t = (i + 0.5) / 2000.0;
      dynamics::TorusPoint w(std::vector<double>(static_cast<std::size_t>(ctx.ens.nu), t));
      worst_overlap = std::max(worst_overlap, randelette::overlap_count(ctx.ens, n, w));
      const auto k = randelette::plateau_covering_index(ctx.ens, n, t);
      std::int64_t flat = 0;
      for (int c = 0; c < ctx.ens.nu; ++c)
        flat = flat * ctx.ens.copies_1d(n) + (k - 1);
      if (randelette::randelette_eval(ctx.ens, n, flat + 1, w) != 1.0) {
        covered = false;
        break;
      }
    }
  }
  j["coverage_ok"] = covered;
  j["worst_overlap"] = worst_overlap;
  j["overlap_bound"] = ctx.ens.overlap_bound;

  // analytic gradient vs central differences
  double worst_rel = 0.0, sup_grad = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto w = stats::sample_omega(ctx.cfg.ensemble.seed, i + 1, ctx.ens.nu);
    const auto th = stats::sample_theta(ctx.cfg.ensemble.seed, i + 1);
    const auto grad = randelette::hull_gradient(ctx.ens, th, w);
    for (int c = 0; c < ctx.ens.nu; ++c) {
      auto up = w.coords(), dn = w.coords();
      up[static_cast<std::size_t>(c)] += 1e-6;
      dn[static_cast<std::size_t>(c)] -= 1e-6;
      const double fd = (randelette::hull_eval(ctx.ens, th, dynamics::TorusPoint(up)) -
                         randelette::hull_eval(ctx.ens, th, dynamics::TorusPoint(dn))) /
                        2e-6;
      const double g = grad[static_cast<std::size_t>(c)];
      worst_rel = std::max(worst_rel, std::fabs(g - fd) / std::max(1.0, std::fabs(fd)));
      sup_grad = std::max(sup_grad, std::fabs(g));
    }
  }
  j["gradient_fd_rel_error"] = worst_rel;
  j["gradient_sup_observed"] = sup_grad;

  // LVB experiment over every site of the configured cube
  const auto cert = dynamics::usr_certificate(ctx.freqs, x.usr_exponent_a,
                                              std::max<std::int64_t>(2 * x.cube_radius, 2));
  if (cert.c_min > 0.0) {
    const lattice::Cube cube{lattice::Site(static_cast<std::size_t>(ctx.freqs.lattice_dim()), 0),
                             x.cube_radius};
    const auto omega = stats::sample_omega(ctx.cfg.ensemble.seed, 0, ctx.ens.nu);
    bool all_frozen = true;
    double worst_slope_rel = 0.0;
    int n_used = 0;
    for (const auto& site : cube.sites()) {
      const auto rep = randelette::lvb_experiment(ctx.ens, ctx.freqs, cube, site, omega,
                                                  x.lvb_trials, ctx.cfg.ensemble.seed, cert);
      all_frozen = all_frozen && rep.frozen_ok;
      worst_slope_rel = std::max(worst_slope_rel,
                                 std::fabs(rep.slope - rep.slope_expected) /
                                     rep.slope_expected);
      n_used = rep.n_used;
    }
    j["lvb"] = {{"frozen_ok", all_frozen},
                {"worst_slope_rel_error", worst_slope_rel},
                {"n_min", n_used},
                {"density_bound", std::exp(ctx.ens.decay_c * n_used)}};
  }
  write_text(ctx.out / "ensemble.json", j.dump(2) + "\n");
  return 0;
}

int run_classify(Ctx& ctx) {
  const auto& x = ctx.cfg.experiment;
  msa::ClassificationConfig ccfg{ctx.sched, ctx.cfg.schedule.m, x.k, 1};
  const auto radius = static_cast<int>(lattice::scale(ctx.sched, x.k));
  const lattice::Cube host{lattice::Site(static_cast<std::size_t>(ctx.freqs.lattice_dim()), 0),
                           radius};
  msa::EnergyPolicy policy;
  policy.explicit_energies = x.explicit_energies;

  std::string csv = report::cube_report_csv_header() + "\n";
  for (int i = 0; i < x.count; ++i) {
    const auto omega = stats::sample_omega(ctx.cfg.ensemble.seed, i, ctx.ens.nu);
    const auto theta = stats::sample_theta(ctx.cfg.ensemble.seed, i);
    const auto rep = msa::classify_cube(host, ccfg, omega, theta, policy, ctx.ens, ctx.freqs);
    write_text(ctx.out / ("report_" + std::to_string(i) + ".json"),
               report::cube_report_json(rep) + "\n");
    csv += report::cube_report_csv_row(rep, ctx.cfg.ensemble.seed, i) + "\n";

    if (x.dump_spectra || x.dump_eigenvectors) {
      const auto h = spectral::assemble(host, omega, theta, ctx.sched.g, ctx.ens, ctx.freqs);
      const auto spec = spectral::spectrum(h);
      if (x.dump_spectra) {
        std::string sc = "index,eigenvalue\n";
        for (Eigen::Index e = 0; e < spec.evals.size(); ++e)
          sc += std::to_string(e) + "," + report::fmt_g17(spec.evals(e)) + "\n";
        write_text(ctx.out / ("spectrum_" + std::to_string(i) + ".csv"), sc);
      }
      if (x.dump_eigenvectors)
        report::write_eigenvector_dump(
            (ctx.out / ("eigenvectors_" + std::to_string(i) + ".bin")).string(), host,
            spec, ctx.cfg.ensemble.seed);
    }
  }
  write_text(ctx.out / "reports.csv", csv);
  return 0;
}

int run_wegner(Ctx& ctx) {
  const auto& x = ctx.cfg.experiment;
  if (x.samples < 100) throw config::ConfigError("experiment.samples: scaling fits need >= 100");
  if (x.s_grid.empty()) throw config::ConfigError("experiment.s_grid: required for wegner");
  stats::WegnerParams p;
  p.cube_radius = x.cube_radius;
  p.d = ctx.freqs.lattice_dim();
  p.g = ctx.cfg.schedule.g;
  p.energy = x.energy;
  p.s_grid = x.s_grid;
  const auto fit = stats::wegner_scan(ctx.ens, ctx.freqs, p, mc_params(ctx));
  write_text(ctx.out / "wegner.csv", report::scaling_csv(fit, "s"));
  write_text(ctx.out / "wegner_fit.json", report::fit_json(fit) + "\n");
  return 0;
}

int run_minami(Ctx& ctx) {
  const auto& x = ctx.cfg.experiment;
  if (x.samples < 100) throw config::ConfigError("experiment.samples: scaling fits need >= 100");
  if (x.interval_grid.empty())
    throw config::ConfigError("experiment.interval_grid: required for minami");
  stats::MinamiParams p;
  p.cube_radius = x.cube_radius;
  p.d = ctx.freqs.lattice_dim();
  p.g = ctx.cfg.schedule.g;
  p.center_energy = x.center_energy;
  p.j = x.j;
  p.interval_grid = x.interval_grid;
  const auto fit = stats::minami_scan(ctx.ens, ctx.freqs, p, mc_params(ctx));
  write_text(ctx.out / "minami.csv", report::minami_csv(fit, x.j));
  write_text(ctx.out / "minami_fit.json", report::fit_json(fit) + "\n");

  const auto hist = stats::spacing_histogram(ctx.ens, ctx.freqs, x.cube_radius,
                                             ctx.freqs.lattice_dim(), ctx.cfg.schedule.g,
                                             x.bins, x.max_spacing, mc_params(ctx));
  write_text(ctx.out / "spacing.csv", report::spacing_csv(hist));
  json j;
  j["degenerate_samples"] = hist.degenerate_samples;
  j["n_samples"] = hist.n_samples;
  j["min_spacing"] = hist.min_spacing;
  write_text(ctx.out / "spacing_summary.json", j.dump(2) + "\n");
  return 0;
}

int run_tunneling(Ctx& ctx) {
  const auto& x = ctx.cfg.experiment;
  const auto g_list = x.g_list.empty() ? std::vector<double>{ctx.cfg.schedule.g} : x.g_list;
  const auto res = stats::tunneling_probability(ctx.ens, ctx.freqs, ctx.cfg.schedule.l0,
                                                x.k, g_list, mc_params(ctx));
  write_text(ctx.out / "prob.csv", report::prob_csv(res.rows));
  return 0;
}

int run_localize(Ctx& ctx) {
  const auto& x = ctx.cfg.experiment;
  const auto g_list = x.g_list.empty() ? std::vector<double>{ctx.cfg.schedule.g} : x.g_list;
  const auto res = stats::localization_probability(ctx.ens, ctx.freqs, ctx.cfg.schedule.l0,
                                                   ctx.cfg.schedule.m, x.k, g_list,
                                                   mc_params(ctx));
  write_text(ctx.out / "prob.csv", report::prob_csv(res.rows));

  json j;
  j["g_list"] = g_list;
  if (g_list.size() >= 2) {
    json tests = json::array();
    for (std::size_t i = 0; i + 1 < g_list.size(); ++i) {
      const auto t = stats::paired_sign_test(res.mhat[i + 1], res.mhat[i]);
      tests.push_back({{"g_low", g_list[i]},
                       {"g_high", g_list[i + 1]},
                       {"wins", t.wins},
                       {"losses", t.losses},
                       {"ties", t.ties},
                       {"p_value", t.p_value},
                       {"significant_95", t.significant_95}});
    }
    j["mhat_sign_tests"] = tests;
  }
  std::string csv = "g,sample,mhat,non_localized\n";
  for (std::size_t gi = 0; gi < g_list.size(); ++gi)
    for (std::size_t i = 0; i < res.mhat[gi].size(); ++i)
      csv += report::fmt_g17(g_list[gi]) + "," + std::to_string(i) + "," +
             report::fmt_g17(res.mhat[gi][i]) + "," +
             std::to_string(static_cast<int>(res.non_localized[gi][i])) + "\n";
  write_text(ctx.out / "mhat.csv", csv);
  write_text(ctx.out / "localize.json", j.dump(2) + "\n");
  return 0;
}

int run_gri_check(Ctx& ctx) {
  const auto& x = ctx.cfg.experiment;
  CounterRng rng(ctx.cfg.ensemble.seed);
  double worst = 0.0;
  int done = 0;
  json rows = json::array();
  while (done < x.gri_instances) {
    const auto omega = stats::sample_omega(ctx.cfg.ensemble.seed, done, ctx.ens.nu);
    const auto theta = stats::sample_theta(ctx.cfg.ensemble.seed, done);
    const lattice::Cube host{lattice::Site(1, 0), x.gri_host_radius};
    const int off_max = x.gri_host_radius - x.gri_inner_radius;
    const lattice::Cube inner{
        {static_cast<int>(rng.next_index(static_cast<std::uint64_t>(2 * off_max + 1))) - off_max},
        x.gri_inner_radius};
    auto pot = [&](const lattice::Site& s) {
      return ctx.cfg.schedule.g *
             randelette::hull_eval(ctx.ens, theta, dynamics::translate(omega, s, ctx.freqs));
    };
    const auto sh = spectral::spectrum(spectral::assemble(host, pot));
    const auto si = spectral::spectrum(spectral::assemble(inner, pot));
    // an energy in a clear gap of both spectra
    const double e = 0.5 * (sh.evals(0) + sh.evals(1));
    if (spectral::dist_to_spectrum(si, e) < 1e-6 || spectral::dist_to_spectrum(sh, e) < 1e-6)
      continue;
    lattice::Site y{static_cast<int>(rng.next_index(static_cast<std::uint64_t>(2 * x.gri_host_radius + 1))) -
                    x.gri_host_radius};
    if (inner.contains(y)) continue;
    const auto chk = spectral::gri_residual(host, inner, pot, e, inner.center, y);
    const double rel = chk.residual / (1.0 + std::fabs(chk.lhs));
    worst = std::max(worst, rel);
    rows.push_back({{"residual", chk.residual}, {"lhs", chk.lhs}, {"relative", rel}});
    ++done;
  }
  json j;
  j["instances"] = done;
  j["worst_relative_residual"] = worst;
  j["pass"] = worst < 1e-9;
  j["details"] = rows;
  write_text(ctx.out / "gri.json", j.dump(2) + "\n");
  return j["pass"].get<bool>() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quasi-periodic lattice operator laboratory"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand

  std::string config_path;
  std::string out_dir;
  int threads = 0;
  std::uint64_t seed_override = 0;
  bool have_seed_override = false;

  app.add_option("--config", config_path, "JSON configuration file")->required();
  app.add_option("--out", out_dir, "output directory (or MSALAB_OUT)");
  app.add_option("--threads", threads, "worker threads (overrides config)");
  auto* seed_opt = app.add_option("--seed-override", seed_override,
                                  "replace the config seed");

  const std::vector<std::pair<std::string, int (*)(Ctx&)>> subs = {
      {"dynamics-check", run_dynamics_check}, {"ensemble-inspect", run_ensemble_inspect},
      {"classify", run_classify},             {"wegner", run_wegner},
      {"minami", run_minami},                 {"tunneling", run_tunneling},
      {"localize", run_localize},             {"gri-check", run_gri_check}};
  std::string chosen;
  for (const auto& [name, fn] : subs)
    app.add_subcommand(name)->callback([&chosen, name = name] { chosen = name; });

  CLI11_PARSE(app, argc, argv);
  have_seed_override = seed_opt->count() > 0;

  Ctx ctx;
  fs::path out;
  try {
    if (out_dir.empty()) {
      const char* env = std::getenv("MSALAB_OUT");
      if (env) out_dir = env;
    }
    if (out_dir.empty())
      throw config::ConfigError("no output directory: pass --out or set MSALAB_OUT");
    out = out_dir;
    fs::create_directories(out);

    ctx.cfg = config::load_config_file(config_path);
    if (have_seed_override) ctx.cfg.ensemble.seed = seed_override;
    if (threads > 0) ctx.cfg.experiment.threads = threads;
    ctx.out = out;
    ctx.freqs = config::build_frequencies(ctx.cfg.dynamics);
    ctx.ens = config::build_ensemble(ctx.cfg.ensemble, ctx.cfg.dynamics.nu);
    ctx.sched = lattice::ScaleSchedule{ctx.cfg.schedule.l0, ctx.cfg.schedule.g,
                                       ctx.cfg.dynamics.nu};

    write_text(ctx.out / "resolved_config.json",
               config::resolved_config_json(ctx.cfg) + "\n");
    write_text(ctx.out / "version.txt", std::string("msalab ") + MSALAB_VERSION +
                                            "\nseed " + std::to_string(ctx.cfg.ensemble.seed) +
                                            "\n");

    for (const auto& [name, fn] : subs)
      if (name == chosen) return fn(ctx);
    throw config::ConfigError("unknown subcommand");
  } catch (const config::ConfigError& e) {
    json diag = {{"error", "config"}, {"message", e.what()}};
    std::cerr << "config error: " << e.what() << "\n";
    if (!out.empty()) {
      std::error_code ec;
      fs::create_directories(out, ec);
      if (!ec) write_text(out / "diagnostics.json", diag.dump(2) + "\n");
    }
    return 1;
  } catch (const std::exception& e) {
    json diag = {{"error", "numerical"}, {"message", e.what()}};
    std::cerr << "error: " << e.what() << "\n";
    if (!out.empty()) {
      std::error_code ec;
      fs::create_directories(out, ec);
      if (!ec) write_text(out / "diagnostics.json", diag.dump(2) + "\n");
    }
    return 2;
  }
}
