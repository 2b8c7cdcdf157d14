#pragma once

#include <string>
#include <vector>

#include "tribaker/types.hpp"

namespace tribaker {

/// Ternary word labelling a periodic orbit. Always stored as the
/// lexicographically minimal rotation of an aperiodic word (a Lyndon word).
class SymbolSequence {
 public:
  SymbolSequence() = default;

  /// Validates symbols in {0,1,2}, aperiodicity and canonical rotation.
  explicit SymbolSequence(std::vector<int> symbols);

  /// Parses "0121"-style text.
  static SymbolSequence parse(const std::string& text);

  /// Rotates an arbitrary aperiodic word into canonical form.
  static SymbolSequence canonicalize(std::vector<int> symbols);

  [[nodiscard]] const std::vector<int>& symbols() const noexcept { return symbols_; }
  [[nodiscard]] int period() const noexcept { return static_cast<int>(symbols_.size()); }
  [[nodiscard]] int operator[](int i) const { return symbols_[static_cast<std::size_t>(i)]; }
  [[nodiscard]] std::string str() const;
  [[nodiscard]] int count(int symbol) const;

  friend bool operator==(const SymbolSequence&, const SymbolSequence&) = default;
  friend auto operator<=>(const SymbolSequence& a, const SymbolSequence& b) {
    return a.symbols_ <=> b.symbols_;
  }

 private:
  std::vector<int> symbols_;
};

struct PeriodicOrbit {
  SymbolSequence symbols;
  std::vector<PhasePoint> points;     // reduced to [0,1)^2
  std::vector<double> step_actions;   // step_actions[l]: action of the step arriving at point l
  double total_action = 0.0;
  bool inside_repeller = false;
  int opening_symbols = 0;            // number of symbols equal to 1

  [[nodiscard]] int period() const noexcept { return symbols.period(); }
};

/// Action picked up by a coherent state in one step of branch `symbol`
/// starting from x and landing on momentum next_p.
///
/// With W(q,p') = 3qp' - e(q + p') the mixed generating function of the
/// branch, the returned value is q'p' - W(q,p'), the phase that the quantum
/// propagator imprints on coherent states in the convention of
/// coherent_state() (see scar_basis.hpp). It simplifies to e*q.
/// Throws std::invalid_argument when symbol disagrees with floor(3q); q = 1
/// is accepted for the seam orbit "2".
double step_action(PhasePoint x, int symbol, double next_p);

/// Builds points and actions from exact base-3 expansions.
PeriodicOrbit orbit_from_symbols(const SymbolSequence& s);

/// One orbit per aperiodic necklace of each period 1..l_max, ordered by
/// period then symbols. Requires 1 <= l_max <= 12.
std::vector<PeriodicOrbit> enumerate_orbits(int l_max);

/// Per-step geometric-mean intensity decay R^(n_1/L); 1 for repeller orbits.
double orbit_weight(const PeriodicOrbit& o, double reflectivity);

struct OrbitSelection {
  std::vector<PeriodicOrbit> ordered_orbits;
  int n_pos = 0;
  int n_max_out = 0;
  int l_max = 0;

  [[nodiscard]] int outside_count() const;
  [[nodiscard]] int scar_function_count() const;
};

struct SelectionRequest {
  int n_pos = 1 << 20;   // effectively "no truncation"
  int n_max_out = 0;
  double reflectivity = 0.0;
  int grid_side = 27;
};

/// Admits every repeller orbit and the n_max_out outside orbits of greatest
/// weight, greedily reorders for phase-space coverage and truncates to n_pos.
OrbitSelection select_orbits(const std::vector<PeriodicOrbit>& all, const SelectionRequest& req);

}  // namespace tribaker
