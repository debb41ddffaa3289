#include "msalab/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace msalab::report {

using nlohmann::json;

std::string fmt_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_line(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  return out;
}

namespace {

json site_json(const lattice::Site& s) { return json(s); }

double finite_or(double v, double fallback) {
  return std::isfinite(v) ? v : fallback;
}

}  // namespace

std::string cube_report_json(const msa::CubeReport& rep) {
  json j;
  j["cube"] = {{"center", site_json(rep.cube.center)}, {"radius", rep.cube.radius}};
  j["k"] = rep.level_k;
  j["g"] = rep.g;
  j["m"] = rep.m;
  j["center_step"] = rep.center_step;
  j["spectrum"] = {{"min", rep.spectrum_min},
                   {"max", rep.spectrum_max},
                   {"solver_residual", rep.solver_residual}};

  json energies = json::array();
  for (const auto& ev : rep.energies) {
    json e;
    e["energy"] = ev.energy;
    e["resonant"] = ev.resonant;
    e["cnr"] = ev.cnr;
    if (ev.ns.has_value()) {
      e["ns"] = *ev.ns;
      e["ns_lhs"] = ev.ns_lhs;
      e["ns_threshold"] = ev.ns_threshold;
    } else {
      e["ns"] = nullptr;
    }
    energies.push_back(e);
  }
  j["energies"] = energies;
  j["policy"] = {{"count", rep.policy_energy_count},
                 {"resonant", rep.policy_resonant_count},
                 {"cnr", rep.policy_cnr_count},
                 {"cnr_and_ns", rep.policy_cnr_ns_count}};
  if (rep.good.has_value()) j["good"] = *rep.good;

  if (rep.level_k >= 1) {
    json t;
    t["flag"] = rep.tunneling.tunneling;
    t["threshold"] = rep.tunneling.threshold;
    t["best_gap"] = finite_or(rep.tunneling.best_gap, -1.0);
    if (rep.tunneling.witness_a && rep.tunneling.witness_b) {
      t["witness_a"] = {{"center", site_json(rep.tunneling.witness_a->center)},
                        {"radius", rep.tunneling.witness_a->radius}};
      t["witness_b"] = {{"center", site_json(rep.tunneling.witness_b->center)},
                        {"radius", rep.tunneling.witness_b->radius}};
    }
    j["tunneling"] = t;

    json mr;
    mr["flag"] = rep.multi_resonance.multi_resonant;
    mr["j_needed"] = rep.multi_resonance.j_needed;
    if (rep.multi_resonance.multi_resonant) {
      mr["witness_energy"] = rep.multi_resonance.witness_energy;
      json fam = json::array();
      for (const auto& c : rep.multi_resonance.family) fam.push_back(site_json(c));
      mr["family"] = fam;
    }
    j["multi_resonant"] = mr;
  }

  json loc;
  loc["flag"] = rep.localization.localized;
  loc["vacuous"] = rep.localization.vacuous;
  loc["rate"] = rep.localization.rate;
  loc["pair_distance_min"] = rep.localization.pair_distance_min;
  if (!rep.localization.localized) {
    loc["worst"] = {{"x", site_json(rep.localization.worst_x)},
                    {"y", site_json(rep.localization.worst_y)},
                    {"eigenindex", rep.localization.worst_eigenindex},
                    {"value", rep.localization.worst_value},
                    {"bound", rep.localization.worst_bound}};
  }
  j["localized"] = loc;
  return j.dump(2);
}

std::string cube_report_csv_header() {
  return "seed,sample,k,g,m,center,radius,n_policy,n_resonant,n_cnr,n_cnr_ns,good,"
         "tunneling,multi_resonant,localized";
}

std::string cube_report_csv_row(const msa::CubeReport& rep, std::uint64_t seed,
                                std::int64_t sample) {
  std::string center;
  for (std::size_t i = 0; i < rep.cube.center.size(); ++i) {
    if (i) center += ';';
    center += std::to_string(rep.cube.center[i]);
  }
  return csv_line({std::to_string(seed), std::to_string(sample),
                   std::to_string(rep.level_k), fmt_g17(rep.g), fmt_g17(rep.m), center,
                   std::to_string(rep.cube.radius),
                   std::to_string(rep.policy_energy_count),
                   std::to_string(rep.policy_resonant_count),
                   std::to_string(rep.policy_cnr_count),
                   std::to_string(rep.policy_cnr_ns_count),
                   rep.good.has_value() ? (*rep.good ? "1" : "0") : "",
                   rep.level_k >= 1 ? (rep.tunneling.tunneling ? "1" : "0") : "",
                   rep.level_k >= 1 ? (rep.multi_resonance.multi_resonant ? "1" : "0") : "",
                   rep.localization.localized ? "1" : "0"});
}

std::string scaling_csv(const stats::ScalingFit& fit, const std::string& abscissa_name) {
  std::ostringstream os;
  os << abscissa_name << ",count,n,p,ci_lo,ci_hi\n";
  for (const auto& pt : fit.points)
    os << csv_line({fmt_g17(pt.abscissa), std::to_string(pt.count),
                    std::to_string(pt.n), fmt_g17(pt.ci.p), fmt_g17(pt.ci.lo),
                    fmt_g17(pt.ci.hi)})
       << "\n";
  return os.str();
}

std::string minami_csv(const stats::ScalingFit& fit, int j) {
  std::ostringstream os;
  os << "interval_len,J,count,n,p,ci_lo,ci_hi\n";
  for (const auto& pt : fit.points)
    os << csv_line({fmt_g17(pt.abscissa), std::to_string(j), std::to_string(pt.count),
                    std::to_string(pt.n), fmt_g17(pt.ci.p), fmt_g17(pt.ci.lo),
                    fmt_g17(pt.ci.hi)})
       << "\n";
  return os.str();
}

std::string prob_csv(const std::vector<stats::ProbRow>& rows) {
  std::ostringstream os;
  os << "g,k,event,count,n,p,ci_lo,ci_hi\n";
  for (const auto& r : rows)
    os << csv_line({fmt_g17(r.g), std::to_string(r.k), r.event,
                    std::to_string(r.count), std::to_string(r.n), fmt_g17(r.ci.p),
                    fmt_g17(r.ci.lo), fmt_g17(r.ci.hi)})
       << "\n";
  return os.str();
}

std::string spacing_csv(const stats::SpacingHistogram& hist) {
  std::ostringstream os;
  os << "bin_lo,bin_hi,mass\n";
  for (std::size_t b = 0; b + 1 < hist.edges.size(); ++b)
    os << csv_line({fmt_g17(hist.edges[b]), fmt_g17(hist.edges[b + 1]),
                    fmt_g17(hist.mass[b])})
       << "\n";
  return os.str();
}

std::string fit_json(const stats::ScalingFit& fit) {
  json j;
  j["valid"] = fit.fit.valid;
  j["slope"] = fit.fit.slope;
  j["intercept"] = fit.fit.intercept;
  j["slope_stderr"] = fit.fit.slope_stderr;
  j["slope_ci"] = fit.fit.slope_ci;
  j["points_used"] = fit.fit.n_points;
  j["min_successes"] = fit.min_successes;
  return j.dump(2);
}

void write_eigenvector_dump(const std::string& path, const msa::Cube& cube,
                            const spectral::SpectralData& spec, std::uint64_t seed) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  std::string center;
  for (std::size_t i = 0; i < cube.center.size(); ++i) {
    if (i) center += ',';
    center += std::to_string(cube.center[i]);
  }
  out << "msalab-evec v1 dim=" << cube.dim() << " radius=" << cube.radius
      << " center=" << center << " n=" << spec.evals.size() << " seed=" << seed
      << "\n";
  out.write(reinterpret_cast<const char*>(spec.evecs.data()),
            static_cast<std::streamsize>(sizeof(double)) * spec.evecs.size());
  out.write(reinterpret_cast<const char*>(spec.evals.data()),
            static_cast<std::streamsize>(sizeof(double)) * spec.evals.size());
}

}  // namespace msalab::report
