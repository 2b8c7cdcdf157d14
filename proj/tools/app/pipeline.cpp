#include "pipeline.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "tribaker/io.hpp"

namespace tribaker::app {

namespace fs = std::filesystem;

std::string policy_name(int n_max_out) {
  return n_max_out == 0 ? std::string("repeller") : "out" + std::to_string(n_max_out);
}

int outside_schedule(double reflectivity) {
  if (reflectivity < 0.01) return 0;
  if (reflectivity < 0.1) return 5;
  return 50;
}

int overlap_policy(double reflectivity) { return reflectivity >= 0.1 ? 5 : 0; }

std::string r_label(double reflectivity) { return "R" + io::fmt_double(reflectivity); }

Pipeline::Pipeline(RunConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  orbits_ = enumerate_orbits(cfg_.l_max);
}

MapSpec Pipeline::map_spec(double reflectivity) const {
  MapSpec spec;
  spec.n_dim = cfg_.n_dim;
  spec.reflectivity = reflectivity;
  spec.validate();
  return spec;
}

int Pipeline::tau() const { return cfg_.tau > 0 ? cfg_.tau : ehrenfest_time(cfg_.n_dim); }

CMatrix Pipeline::propagator(double reflectivity) const { return open_propagator(map_spec(reflectivity)); }

fs::path Pipeline::cache_entry(const std::string& key) const { return cfg_.out / "cache" / io::hash_key(key); }

namespace {

// Publishes a freshly written temporary folder. Losing the race to another
// job that produced the same entry is fine: contents are identical.
void publish(const fs::path& tmp, const fs::path& dir) {
  std::error_code ec;
  fs::rename(tmp, dir, ec);
  if (ec) fs::remove_all(tmp);
}

fs::path temp_sibling(const fs::path& dir) {
  std::ostringstream os;
  os << dir.string() << ".tmp." << std::this_thread::get_id();
  return os.str();
}

void write_key(const fs::path& dir, const std::string& key) {
  std::ofstream(dir / "key.txt", std::ios::binary) << key << "\n";
}

}  // namespace

ResonanceSet Pipeline::resonances(double reflectivity) const {
  const MapSpec spec = map_spec(reflectivity);
  const std::string key = "resonances;n=" + std::to_string(spec.n_dim) + ";r=" + io::fmt_double(reflectivity) +
                          ";chi=" + io::fmt_double(spec.chi_q) + "," + io::fmt_double(spec.chi_p);
  const fs::path dir = cache_entry(key);
  if (fs::exists(dir / "key.txt")) return io::read_resonances(dir, cfg_.n_c);

  ResonanceSet set = exact_resonances(open_propagator(spec), cfg_.n_c);
  const fs::path tmp = temp_sibling(dir);
  fs::remove_all(tmp);
  io::write_resonances(tmp, set);
  write_key(tmp, key);
  publish(tmp, dir);
  return set;
}

OrbitSelection Pipeline::selection(double reflectivity, int n_max_out) const {
  SelectionRequest req;
  req.n_max_out = n_max_out;
  req.reflectivity = reflectivity;
  req.grid_side = cfg_.cover_grid;
  return select_orbits(orbits_, req);
}

ScarBasisSet Pipeline::scar_basis(double reflectivity, int n_max_out, const CMatrix& u_tilde) const {
  return build_scar_basis(selection(reflectivity, n_max_out).ordered_orbits, u_tilde, tau());
}

ScarMatrices Pipeline::scar_matrices(double reflectivity, int n_max_out, const CMatrix& u_tilde) const {
  const std::string key = "scar-matrices;n=" + std::to_string(cfg_.n_dim) + ";r=" + io::fmt_double(reflectivity) +
                          ";chi=0.5,0.5;lmax=" + std::to_string(cfg_.l_max) + ";policy=" + policy_name(n_max_out) +
                          ";cover=" + std::to_string(cfg_.cover_grid) + ";tau=" + std::to_string(tau());
  const fs::path dir = cache_entry(key);
  if (fs::exists(dir / "key.txt")) return {io::read_matrix(dir / "a.bin"), io::read_matrix(dir / "s.bin")};

  ScarMatrices m = assemble_matrices(scar_basis(reflectivity, n_max_out, u_tilde), u_tilde);
  const fs::path tmp = temp_sibling(dir);
  fs::remove_all(tmp);
  fs::create_directories(tmp);
  io::write_matrix(tmp / "a.bin", m.a);
  io::write_matrix(tmp / "s.bin", m.s);
  write_key(tmp, key);
  publish(tmp, dir);
  return m;
}

MinBasisRequest Pipeline::min_basis_request() const {
  MinBasisRequest req;
  req.target_p = cfg_.target_p;
  req.eps = cfg_.eps;
  req.svd_tol = cfg_.svd_tol;
  req.scan_stride = cfg_.scan_stride;
  return req;
}

}  // namespace tribaker::app
