#pragma once

#include <atomic>
#include <exception>
#include <filesystem>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "config.hpp"
#include "tribaker/periodic_orbits.hpp"
#include "tribaker/quantum_map.hpp"
#include "tribaker/scar_basis.hpp"
#include "tribaker/semiclassical.hpp"

namespace tribaker::app {

/// "repeller" for n_max_out = 0, otherwise "out<k>".
std::string policy_name(int n_max_out);

/// Outside-orbit budget behind the inside/outside projector panels: none below R = 0.01,
/// 5 up to R = 0.1 and 50 beyond, so the outside set grows with R.
int outside_schedule(double reflectivity);

/// Basis used for the semiclassical partial quantum repeller when no
/// explicit --nmax-out is given.
int overlap_policy(double reflectivity);

/// Filesystem-friendly R label.
std::string r_label(double reflectivity);

/// Shared, cache-backed building blocks for the commands. Cached objects
/// live under <out>/cache/<fnv hash of the defining parameters>/ and are
/// written to a temporary folder first, then renamed, so concurrent jobs
/// never observe half-written entries.
class Pipeline {
 public:
  explicit Pipeline(RunConfig cfg);

  [[nodiscard]] const RunConfig& config() const noexcept { return cfg_; }
  [[nodiscard]] MapSpec map_spec(double reflectivity) const;
  [[nodiscard]] int tau() const;

  [[nodiscard]] CMatrix propagator(double reflectivity) const;
  ResonanceSet resonances(double reflectivity) const;

  [[nodiscard]] const std::vector<PeriodicOrbit>& all_orbits() const noexcept { return orbits_; }
  [[nodiscard]] OrbitSelection selection(double reflectivity, int n_max_out) const;

  [[nodiscard]] ScarBasisSet scar_basis(double reflectivity, int n_max_out, const CMatrix& u_tilde) const;
  ScarMatrices scar_matrices(double reflectivity, int n_max_out, const CMatrix& u_tilde) const;

  [[nodiscard]] MinBasisRequest min_basis_request() const;

 private:
  std::filesystem::path cache_entry(const std::string& key) const;

  RunConfig cfg_;
  std::vector<PeriodicOrbit> orbits_;
};

/// Runs fn(i) for i in [0, count) on `jobs` worker threads. The first
/// exception thrown by any job is rethrown after all workers have joined.
template <typename Fn>
void run_jobs(int jobs, std::size_t count, Fn&& fn) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const auto n = std::min<std::size_t>(static_cast<std::size_t>(jobs), count);
  pool.reserve(n);
  for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace tribaker::app
