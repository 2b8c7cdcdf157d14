#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "app/commands.hpp"
#include "app/config.hpp"
#include "app/pipeline.hpp"
#include "tribaker/io.hpp"

using namespace tribaker;
using namespace tribaker::app;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "tribaker_test_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Small, fast settings shared by the command tests.
Overrides small(const fs::path& out) {
  return {{"n", "27"}, {"lmax", "4"}, {"nc", "6"},          {"samples", "20000"},
          {"grid", "27"}, {"tau", "3"}, {"out", out.string()}, {"cover_grid", "9"}};
}

}  // namespace

TEST_CASE("config parsing and validation") {
  RunConfig cfg;
  apply_setting(cfg, "target-p", "0.7");
  apply_setting(cfg, "nmax_out", "5");
  apply_setting(cfg, "r", "0.07, 0.2");
  apply_setting(cfg, "large", "true");
  CHECK(cfg.target_p == 0.7);
  CHECK(cfg.n_max_out == 5);
  CHECK(cfg.reflectivities == std::vector<double>{0.07, 0.2});
  CHECK(cfg.large);

  CHECK_THROWS_AS(apply_setting(cfg, "colour", "red"), std::invalid_argument);
  CHECK_THROWS_AS(apply_setting(cfg, "n", "many"), std::invalid_argument);
  CHECK_THROWS_AS(apply_setting(cfg, "large", "perhaps"), std::invalid_argument);
  CHECK(parse_list("0.1,,0.2") == std::vector<double>{0.1, 0.2});
  CHECK_THROWS_AS(parse_list("0.1,x"), std::invalid_argument);

  RunConfig big;
  big.n_dim = 729;
  CHECK_THROWS_AS(big.validate(), std::invalid_argument);
  big.large = true;
  CHECK_NOTHROW(big.validate());

  RunConfig bad_r;
  bad_r.reflectivities = {1.5};
  CHECK_THROWS_AS(bad_r.validate(), std::invalid_argument);
}

TEST_CASE("presets and layering") {
  for (const char* name : {"fig1", "fig2", "fig3", "fig4", "large", "quick"}) {
    CHECK(presets().count(name) == 1);
    RunConfig cfg;
    apply_preset(cfg, name);
    CHECK_NOTHROW(cfg.validate());
  }
  CHECK_THROWS_AS(make_config("fig9", {}), std::invalid_argument);

  const RunConfig fig3 = make_config("fig3", {});
  CHECK(fig3.reflectivities.size() == 10);
  CHECK(fig3.policies == std::vector<int>{0, 5, 50});

  // File settings sit between the preset and explicit overrides.
  const fs::path dir = fresh_dir("layering");
  std::ofstream(dir / "run.cfg") << "# comment\n\npreset = fig4\nnc = 30\ngrid=64\n";
  RunConfig cfg = make_config("fig1", {});
  apply_file(cfg, dir / "run.cfg");
  CHECK(cfg.reflectivities == std::vector<double>{0.07, 0.2});
  CHECK(cfg.n_c == 30);
  CHECK(cfg.grid == 64);
  apply_setting(cfg, "grid", "32");
  CHECK(cfg.grid == 32);

  std::ofstream(dir / "broken.cfg") << "nc 30\n";
  CHECK_THROWS_AS(read_settings(dir / "broken.cfg"), std::invalid_argument);

  CHECK(describe(cfg) == describe(cfg));
  CHECK(describe(cfg).find("nc=30") != std::string::npos);
}

TEST_CASE("naming helpers") {
  CHECK(policy_name(0) == "repeller");
  CHECK(policy_name(50) == "out50");
  CHECK(outside_schedule(0.001) == 0);
  CHECK(outside_schedule(0.07) == 5);
  CHECK(outside_schedule(0.2) == 50);
  CHECK(overlap_policy(0.07) == 0);
  CHECK(overlap_policy(0.2) == 5);
  CHECK(r_label(0.07) == "R0.07");
}

TEST_CASE("job runner") {
  std::vector<std::atomic<int>> hits(37);
  run_jobs(4, hits.size(), [&](std::size_t i) { hits[i]++; });
  for (const auto& h : hits) CHECK(h.load() == 1);

  CHECK_THROWS_AS(run_jobs(3, 10,
                           [](std::size_t i) {
                             if (i == 6) throw std::runtime_error("job 6");
                           }),
                  std::runtime_error);
  CHECK_THROWS_AS(run_jobs(1, 3, [](std::size_t) { throw std::logic_error("serial"); }), std::logic_error);
}

TEST_CASE("measure output is byte-identical across runs and job counts") {
  const fs::path a = fresh_dir("measure_a");
  const fs::path b = fresh_dir("measure_b");
  Overrides oa = small(a);
  oa.emplace_back("r", "0.07");
  Overrides ob = small(b);
  ob.emplace_back("r", "0.07");
  ob.emplace_back("jobs", "2");
  cmd_measure(make_config("fig1", oa));
  const std::string first = slurp(a / "measure" / "R0.07" / "mu.csv");
  cmd_measure(make_config("fig1", oa));
  cmd_measure(make_config("fig1", ob));
  CHECK(!first.empty());
  CHECK(slurp(a / "measure" / "R0.07" / "mu.csv") == first);
  CHECK(slurp(b / "measure" / "R0.07" / "mu.csv") == first);
  CHECK(slurp(b / "measure" / "checksums.csv") == slurp(a / "measure" / "checksums.csv"));
  CHECK(fs::exists(a / "measure" / "R0.07" / "mu.pgm"));
  CHECK(first.find('\r') == std::string::npos);
}

TEST_CASE("sweep summary is idempotent and resonances are cached") {
  const fs::path out = fresh_dir("sweep");
  Overrides o = small(out);
  o.emplace_back("r", "0.2,0.5");
  o.emplace_back("policies", "0,5");
  o.emplace_back("target_p", "0.5");
  const RunConfig cfg = make_config("fig3", o);

  cmd_sweep(cfg);
  const fs::path summary = out / "sweep" / "summary.csv";
  const std::string first = slurp(summary);
  const io::CsvTable t = io::CsvTable::read(summary);
  CHECK(t.rows().size() == 4);
  CHECK(t.header()[6] == "n_sf_over_n");

  std::size_t entries = 0;
  for (const auto& e : fs::directory_iterator(out / "cache")) entries += e.is_directory() ? 1 : 0;
  CHECK(entries > 0);
  const auto stamp = fs::last_write_time(out / "cache");

  // A rerun reuses the cache and upserts the same rows.
  RunConfig again = cfg;
  again.jobs = 2;
  cmd_sweep(again);
  CHECK(slurp(summary) == first);
  std::size_t entries2 = 0;
  for (const auto& e : fs::directory_iterator(out / "cache")) entries2 += e.is_directory() ? 1 : 0;
  CHECK(entries2 == entries);
  CHECK(fs::last_write_time(out / "cache") == stamp);

  // Cached resonances equal a fresh computation.
  const Pipeline pipe(cfg);
  const ResonanceSet cached = pipe.resonances(0.2);
  const ResonanceSet direct = exact_resonances(pipe.propagator(0.2), cfg.n_c);
  CHECK(cached.eigenvalues == direct.eigenvalues);
  CHECK(cached.cutoff == direct.cutoff);
}

TEST_CASE("spectrum, orbits and repeller commands write their tables") {
  const fs::path out = fresh_dir("commands");
  Overrides o = small(out);
  o.emplace_back("r", "0.2");
  cmd_spectrum(make_config("fig3", o));
  CHECK(fs::exists(out / "spectrum" / "R0.2.csv"));
  CHECK(io::CsvTable::read(out / "spectrum" / "R0.2.csv").rows().size() == 27);

  cmd_orbits(make_config("fig2", o));
  CHECK(io::CsvTable::read(out / "orbits" / "census.csv").rows().size() == 4);

  cmd_repeller(make_config("fig4", o));
  const io::CsvTable rep = io::CsvTable::read(out / "repeller" / "summary.csv");
  REQUIRE(rep.rows().size() == 1);
  const double overlap = std::stod(rep.rows()[0][5]);
  CHECK(overlap > 0.0);
  CHECK(overlap <= 1.0 + 1e-12);
  CHECK(io::read_pgm(out / "repeller" / "R0.2" / "Q_exact.pgm").width == 27);
}
