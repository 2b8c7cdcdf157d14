#include "commands.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>

#include "pipeline.hpp"
#include "tribaker/classical_map.hpp"
#include "tribaker/io.hpp"
#include "tribaker/phase_space.hpp"

namespace tribaker::app {

namespace fs = std::filesystem;

namespace {

std::mutex log_mutex;

void log_line(const std::string& msg) {
  std::lock_guard lock(log_mutex);
  std::cerr << msg << std::endl;
}

void write_manifest(const RunConfig& cfg, const std::string& command) {
  const fs::path dir = cfg.out / command;
  fs::create_directories(dir);
  std::ofstream(dir / "config.txt", std::ios::binary) << describe(cfg);
}

std::string file_hash(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return io::hash_key(ss.str());
}

// Loads `path` when it exists with the same header, else starts empty.
io::CsvTable load_or_create(const fs::path& path, const std::vector<std::string>& header) {
  if (fs::exists(path)) {
    io::CsvTable t = io::CsvTable::read(path);
    if (t.header() == header) return t;
  }
  return io::CsvTable(header);
}

// CSV plus linear and log graymaps.
void write_image(const fs::path& stem, const PhaseSpaceImage& img) {
  io::image_table(img).write(stem.string() + ".csv");
  io::write_pgm(stem.string() + ".pgm", img.grid_side, img.values, {8, io::IntensityScale::kLinear});
  io::write_pgm(stem.string() + "_log.pgm", img.grid_side, img.values, {8, io::IntensityScale::kLog});
}

int image_grid(const RunConfig& cfg) { return cfg.grid > 0 ? cfg.grid : 128; }

struct SweepJob {
  double reflectivity = 0.0;
  int n_max_out = 0;
};

const std::vector<std::string> kSweepHeader = {"R",     "policy",  "n_max_out", "n_dim",       "basis_size",
                                               "n_sf",  "n_sf_over_n", "reached",  "performance", "matched",
                                               "n_c",   "eps",      "target_p"};

// Runs find_min_basis for every job and upserts one summary row per job.
void run_sweep(const RunConfig& cfg, const std::vector<SweepJob>& jobs, const fs::path& dir) {
  const Pipeline pipe(cfg);
  fs::create_directories(dir / "trace");

  std::vector<double> rs;
  for (const auto& j : jobs) rs.push_back(j.reflectivity);
  std::sort(rs.begin(), rs.end());
  rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
  std::vector<ResonanceSet> spectra(rs.size());
  run_jobs(cfg.jobs, rs.size(), [&](std::size_t i) { spectra[i] = pipe.resonances(rs[i]); });

  std::vector<std::vector<std::string>> rows(jobs.size());
  run_jobs(cfg.jobs, jobs.size(), [&](std::size_t i) {
    const SweepJob& job = jobs[i];
    const auto ri = static_cast<std::size_t>(std::lower_bound(rs.begin(), rs.end(), job.reflectivity) - rs.begin());
    const CMatrix u = pipe.propagator(job.reflectivity);
    const ScarMatrices mats = pipe.scar_matrices(job.reflectivity, job.n_max_out, u);
    const MinBasisResult res = find_min_basis(mats, spectra[ri], pipe.min_basis_request());

    io::CsvTable trace({"R", "policy", "n_sf", "rank_used", "performance"});
    for (const auto& t : res.trace) {
      trace.add_row({io::fmt_double(job.reflectivity), policy_name(job.n_max_out), std::to_string(t.n_sf),
                     std::to_string(t.rank_used), io::fmt_double(t.performance)});
    }
    trace.write(dir / "trace" / (r_label(job.reflectivity) + "_" + policy_name(job.n_max_out) + ".csv"));

    const double fraction = basis_fraction(res, cfg.n_dim);
    rows[i] = {io::fmt_double(job.reflectivity), policy_name(job.n_max_out), std::to_string(job.n_max_out),
               std::to_string(cfg.n_dim),       std::to_string(res.basis_size), std::to_string(res.n_sf),
               io::fmt_double(fraction),        res.reached ? "1" : "0",       io::fmt_double(res.report.performance),
               std::to_string(res.report.matched), std::to_string(cfg.n_c),    io::fmt_double(cfg.eps),
               io::fmt_double(cfg.target_p)};
    log_line("sweep " + r_label(job.reflectivity) + " " + policy_name(job.n_max_out) + ": basis " +
             std::to_string(res.basis_size) + ", N_SF " + std::to_string(res.n_sf) + " (" +
             (res.reached ? "reached" : "not reached") + "), N_SF/N " + io::fmt_double(fraction));
  });

  const fs::path summary = dir / "summary.csv";
  io::CsvTable table = load_or_create(summary, kSweepHeader);
  for (const auto& row : rows) table.upsert(row, 2);
  table.write(summary);
}

}  // namespace

std::string default_preset(const std::string& command) {
  if (command == "measure") return "fig1";
  if (command == "repeller") return "fig4";
  if (command == "orbits") return "fig2";
  return "fig3";
}

RunConfig make_config(const std::string& preset, const Overrides& overrides) {
  RunConfig cfg;
  if (!preset.empty()) apply_preset(cfg, preset);
  for (const auto& [k, v] : overrides) apply_setting(cfg, k, v);
  cfg.validate();
  return cfg;
}

void cmd_measure(const RunConfig& cfg) {
  cfg.validate();
  const fs::path dir = cfg.out / "measure";
  write_manifest(cfg, "measure");
  const int side = cfg.grid > 0 ? cfg.grid : 243;

  const auto& rs = cfg.reflectivities;
  run_jobs(cfg.jobs, rs.size(), [&](std::size_t i) {
    MapSpec spec;
    spec.n_dim = cfg.n_dim;
    spec.reflectivity = rs[i];
    MeasureRequest req;
    req.time = cfg.time;
    req.grid_side = side;
    req.samples = cfg.samples;
    req.seed = cfg.seed;

    req.direction = Direction::kForward;
    const MeasureGrid mu_b = compute_measure(spec, req);
    req.direction = Direction::kBackward;
    const MeasureGrid mu_f = compute_measure(spec, req);
    const MeasureGrid mu = partial_repeller_measure(mu_b, mu_f);

    const fs::path rdir = dir / r_label(rs[i]);
    fs::create_directories(rdir);
    for (const auto& [name, grid] : {std::pair{"mu_b", &mu_b}, {"mu_f", &mu_f}, {"mu", &mu}}) {
      io::measure_table(*grid).write(rdir / (std::string(name) + ".csv"));
      io::write_pgm(rdir / (std::string(name) + ".pgm"), grid->cells_per_side, grid->weights,
                    {8, io::IntensityScale::kLog});
    }
    log_line("measure " + r_label(rs[i]) + ": wrote mu_b, mu_f, mu on " + std::to_string(side) + "^2");
  });

  io::CsvTable sums({"file", "fnv1a"});
  for (double r : rs) {
    for (const char* name : {"mu_b", "mu_f", "mu"}) {
      const fs::path rel = fs::path(r_label(r)) / (std::string(name) + ".csv");
      sums.add_row({rel.generic_string(), file_hash(dir / rel)});
    }
  }
  sums.write(dir / "checksums.csv");
}

void cmd_spectrum(const RunConfig& cfg) {
  const Pipeline pipe(cfg);
  const fs::path dir = cfg.out / "spectrum";
  write_manifest(cfg, "spectrum");
  const auto& rs = cfg.reflectivities;
  std::vector<std::vector<std::string>> rows(rs.size());
  run_jobs(cfg.jobs, rs.size(), [&](std::size_t i) {
    const ResonanceSet set = pipe.resonances(rs[i]);
    io::spectrum_table(set.eigenvalues).write(dir / (r_label(rs[i]) + ".csv"));
    rows[i] = {io::fmt_double(rs[i]), std::to_string(cfg.n_dim), std::to_string(set.n_longlived),
               io::fmt_double(set.cutoff), io::fmt_double(std::abs(set.eigenvalues(0))),
               std::to_string(set.defective.size())};
    log_line("spectrum " + r_label(rs[i]) + ": nu_c " + io::fmt_double(set.cutoff));
  });
  const fs::path summary = dir / "summary.csv";
  io::CsvTable table =
      load_or_create(summary, {"R", "n_dim", "n_c", "nu_c", "spectral_radius", "defective_pairs"});
  for (const auto& row : rows) table.upsert(row, 2);
  table.write(summary);
}

void cmd_orbits(const RunConfig& cfg) {
  const Pipeline pipe(cfg);
  const fs::path dir = cfg.out / "orbits";
  write_manifest(cfg, "orbits");
  const auto& all = pipe.all_orbits();
  const double r0 = cfg.reflectivities.empty() ? 0.0 : cfg.reflectivities.front();
  io::orbit_table(all, r0).write(dir / "orbits.csv");

  io::CsvTable census({"period", "orbits", "inside"});
  for (int l = 1; l <= cfg.l_max; ++l) {
    const auto total = std::count_if(all.begin(), all.end(), [l](const auto& o) { return o.period() == l; });
    const auto inside = std::count_if(all.begin(), all.end(),
                                      [l](const auto& o) { return o.period() == l && o.inside_repeller; });
    census.add_row({std::to_string(l), std::to_string(total), std::to_string(inside)});
  }
  census.write(dir / "census.csv");

  std::vector<int> policies = cfg.policies;
  if (cfg.n_max_out >= 0) policies = {cfg.n_max_out};
  for (double r : cfg.reflectivities) {
    for (int p : policies) {
      const OrbitSelection sel = pipe.selection(r, p);
      io::orbit_table(sel.ordered_orbits, r).write(dir / ("selection_" + r_label(r) + "_" + policy_name(p) + ".csv"));
      log_line("orbits " + r_label(r) + " " + policy_name(p) + ": " + std::to_string(sel.ordered_orbits.size()) +
               " orbits, " + std::to_string(sel.scar_function_count()) + " scar functions");
    }
  }
  log_line("orbits: " + std::to_string(all.size()) + " up to period " + std::to_string(cfg.l_max));
}

void cmd_sweep(const RunConfig& cfg) {
  cfg.validate();
  write_manifest(cfg, "sweep");
  std::vector<int> policies = cfg.policies;
  if (cfg.n_max_out >= 0) policies = {cfg.n_max_out};
  std::vector<SweepJob> jobs;
  for (double r : cfg.reflectivities) {
    for (int p : policies) jobs.push_back({r, p});
  }
  run_sweep(cfg, jobs, cfg.out / "sweep");
}

void cmd_large(const RunConfig& cfg) {
  cfg.validate();
  write_manifest(cfg, "large");
  std::vector<SweepJob> jobs;
  for (double r : cfg.reflectivities) {
    jobs.push_back({r, cfg.n_max_out >= 0 ? cfg.n_max_out : (r >= 0.1 ? 50 : 0)});
  }
  run_sweep(cfg, jobs, cfg.out / "large");
}

void cmd_repeller(const RunConfig& cfg) {
  const Pipeline pipe(cfg);
  const fs::path dir = cfg.out / "repeller";
  write_manifest(cfg, "repeller");
  const int side = image_grid(cfg);
  const CoherentGrid grid(side, cfg.n_dim);
  const auto& rs = cfg.reflectivities;

  std::vector<std::vector<std::string>> rows(rs.size());
  run_jobs(cfg.jobs, rs.size(), [&](std::size_t i) {
    const double r = rs[i];
    const fs::path rdir = dir / r_label(r);
    fs::create_directories(rdir);
    const ResonanceSet exact = pipe.resonances(r);
    const CMatrix u = pipe.propagator(r);
    const int nc = cfg.n_c;

    std::vector<int> skipped_exact;
    const CVector diag_exact =
        husimi_diagonal(grid, exact.right.leftCols(nc), exact.left.leftCols(nc), &skipped_exact);
    const PhaseSpaceImage img_exact = modulus_image(grid, diag_exact, "Q_exact");

    const int policy = cfg.n_max_out >= 0 ? cfg.n_max_out : overlap_policy(r);
    const ScarBasisSet basis = pipe.scar_basis(r, policy, u);
    const ScarMatrices mats = assemble_matrices(basis, u);
    const MinBasisResult mb = find_min_basis(mats, exact, pipe.min_basis_request());
    const ScarMatrices sub = mats.leading(mb.n_sf);
    const GeneralizedSpectrum gs = solve_generalized(sub.a, sub.s, cfg.svd_tol, true);
    const ReconstructedStates rec = reconstruct_states(basis.prefix(mb.n_sf), gs);
    const int used = std::min<int>(nc, static_cast<int>(rec.right.cols()));
    std::vector<int> skipped_sc;
    const CVector diag_sc = husimi_diagonal(grid, rec.right.leftCols(used), rec.left.leftCols(used), &skipped_sc);
    const PhaseSpaceImage img_sc = modulus_image(grid, diag_sc, "Q_semiclassical");
    const double o = overlap(img_exact, img_sc);

    write_image(rdir / "Q_exact", img_exact);
    write_image(rdir / "Q_semiclassical", img_sc);

    // Inside/outside sums of scar-function projectors.
    const int n_out = outside_schedule(r);
    const ScarBasisSet fig2 = n_out == policy ? basis : pipe.scar_basis(r, n_out, u);
    std::vector<Eigen::Index> in_cols;
    std::vector<Eigen::Index> out_cols;
    for (int k = 0; k < fig2.size(); ++k) {
      (fig2.functions[static_cast<std::size_t>(k)].inside_repeller ? in_cols : out_cols).push_back(k);
    }
    const CMatrix right2 = fig2.right_matrix();
    const CMatrix left2 = fig2.left_matrix();
    auto panel = [&](const std::vector<Eigen::Index>& cols, const std::string& label) {
      if (cols.empty()) {
        PhaseSpaceImage img;
        img.grid_side = side;
        img.values.assign(static_cast<std::size_t>(side) * side, 0.0);
        img.label = label;
        return img;
      }
      return modulus_image(grid, husimi_diagonal(grid, right2(Eigen::all, cols), left2(Eigen::all, cols)), label);
    };
    const PhaseSpaceImage inside = panel(in_cols, "h_inside");
    const PhaseSpaceImage outside = panel(out_cols, "h_outside");
    write_image(rdir / "h_inside", inside);
    write_image(rdir / "h_outside", outside);

    rows[i] = {io::fmt_double(r),
               policy_name(policy),
               std::to_string(mb.n_sf),
               mb.reached ? "1" : "0",
               std::to_string(used),
               io::fmt_double(o),
               io::fmt_double(riemann_trace(grid, diag_exact).real()),
               io::fmt_double(img_exact.mass(cfg.n_dim)),
               io::fmt_double(riemann_trace(grid, diag_sc).real()),
               io::fmt_double(img_sc.mass(cfg.n_dim)),
               std::to_string(skipped_exact.size() + skipped_sc.size()),
               policy_name(n_out),
               std::to_string(in_cols.size()),
               io::fmt_double(inside.mass(cfg.n_dim)),
               std::to_string(out_cols.size()),
               io::fmt_double(outside.mass(cfg.n_dim))};
    log_line("repeller " + r_label(r) + " " + policy_name(policy) + ": N_SF " + std::to_string(mb.n_sf) +
             ", O = " + io::fmt_double(o) + ", outside mass " + io::fmt_double(outside.mass(cfg.n_dim)));
  });

  const fs::path summary = dir / "summary.csv";
  io::CsvTable table = load_or_create(
      summary, {"R", "policy", "n_sf", "reached", "states_used", "overlap", "trace_exact", "mass_exact",
                "trace_semiclassical", "mass_semiclassical", "skipped_projectors", "panel_policy",
                "inside_functions", "inside_mass", "outside_functions", "outside_mass"});
  for (const auto& row : rows) table.upsert(row, 1);
  table.write(summary);
}

void cmd_reproduce(const Overrides& overrides) {
  bool large = false;
  for (const auto& [k, v] : overrides) {
    if (k == "large") large = (v == "1" || v == "true");
  }
  Overrides base;
  for (const auto& kv : overrides) {
    if (kv.first != "large") base.push_back(kv);
  }
  cmd_measure(make_config("fig1", base));
  cmd_orbits(make_config("fig2", base));
  cmd_spectrum(make_config("fig3", base));
  cmd_sweep(make_config("fig3", base));
  cmd_repeller(make_config("fig4", base));
  if (large) {
    Overrides big = base;
    big.emplace_back("large", "1");
    cmd_large(make_config("large", big));
  }
}

}  // namespace tribaker::app
