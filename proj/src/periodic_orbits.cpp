#include "tribaker/periodic_orbits.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <utility>

namespace tribaker {

namespace {

bool is_periodic_word(const std::vector<int>& w) {
  const std::size_t n = w.size();
  for (std::size_t d = 1; d < n; ++d) {
    if (n % d != 0) continue;
    bool repeats = true;
    for (std::size_t i = d; i < n && repeats; ++i) repeats = w[i] == w[i - d];
    if (repeats) return true;
  }
  return false;
}

std::vector<int> rotate_left(const std::vector<int>& w, std::size_t k) {
  std::vector<int> r(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) r[i] = w[(i + k) % w.size()];
  return r;
}

std::uint64_t pow3(int n) {
  std::uint64_t r = 1;
  for (int i = 0; i < n; ++i) r *= 3;
  return r;
}

// Exact rational coordinate 0.d0 d1 ... repeating, as numerator over 3^L - 1.
std::uint64_t base3_value(const std::vector<int>& w, std::size_t start, bool reversed) {
  const std::size_t n = w.size();
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t idx = reversed ? (start + n - i) % n : (start + i) % n;
    v = v * 3 + static_cast<std::uint64_t>(w[idx]);
  }
  return v;
}

}  // namespace

SymbolSequence::SymbolSequence(std::vector<int> symbols) : symbols_(std::move(symbols)) {
  if (symbols_.empty()) throw std::invalid_argument("SymbolSequence: empty word");
  for (int s : symbols_) {
    if (s < 0 || s > 2) throw std::invalid_argument("SymbolSequence: symbols must be 0, 1 or 2");
  }
  if (is_periodic_word(symbols_)) {
    throw std::invalid_argument("SymbolSequence: word " + str() + " is a repetition of a shorter word");
  }
  for (std::size_t k = 1; k < symbols_.size(); ++k) {
    if (rotate_left(symbols_, k) < symbols_) {
      throw std::invalid_argument("SymbolSequence: word " + str() + " is not the minimal rotation");
    }
  }
}

SymbolSequence SymbolSequence::parse(const std::string& text) {
  std::vector<int> w;
  w.reserve(text.size());
  for (char c : text) {
    if (c < '0' || c > '2') throw std::invalid_argument("SymbolSequence: bad symbol in '" + text + "'");
    w.push_back(c - '0');
  }
  return SymbolSequence(std::move(w));
}

SymbolSequence SymbolSequence::canonicalize(std::vector<int> symbols) {
  std::vector<int> best = symbols;
  for (std::size_t k = 1; k < symbols.size(); ++k) best = std::min(best, rotate_left(symbols, k));
  return SymbolSequence(std::move(best));
}

std::string SymbolSequence::str() const {
  std::string s;
  for (int v : symbols_) s.push_back(static_cast<char>('0' + v));
  return s;
}

int SymbolSequence::count(int symbol) const {
  return static_cast<int>(std::count(symbols_.begin(), symbols_.end(), symbol));
}

double step_action(PhasePoint x, int symbol, double next_p) {
  const int expected = std::min(static_cast<int>(3.0 * x.q), 2);
  if (symbol < 0 || symbol > 2 || expected != symbol) {
    throw std::invalid_argument("step_action: symbol inconsistent with q");
  }
  const double next_q = 3.0 * x.q - symbol;
  const double generating = 3.0 * x.q * next_p - symbol * (x.q + next_p);
  return next_q * next_p - generating;
}

PeriodicOrbit orbit_from_symbols(const SymbolSequence& s) {
  const auto& w = s.symbols();
  const int period = s.period();
  if (period > 12) throw std::invalid_argument("orbit_from_symbols: period above 12");
  const double denom = static_cast<double>(pow3(period) - 1);

  PeriodicOrbit o;
  o.symbols = s;
  o.opening_symbols = s.count(1);
  o.inside_repeller = o.opening_symbols == 0;

  // Unreduced coordinates: the all-2 word sits at q = p = 1.
  std::vector<PhasePoint> raw(static_cast<std::size_t>(period));
  for (int j = 0; j < period; ++j) {
    const auto uj = static_cast<std::size_t>(j);
    // p_j carries the past symbols e_{j-1}, e_{j-2}, ...
    const std::size_t past_start = (uj + w.size() - 1) % w.size();
    raw[uj] = {static_cast<double>(base3_value(w, uj, false)) / denom,
               static_cast<double>(base3_value(w, past_start, true)) / denom};
  }
  o.points.reserve(raw.size());
  for (const auto& r : raw) o.points.push_back({wrap_unit(r.q), wrap_unit(r.p)});

  o.step_actions.resize(raw.size());
  for (int l = 0; l < period; ++l) {
    const auto from = static_cast<std::size_t>((l + period - 1) % period);
    o.step_actions[static_cast<std::size_t>(l)] =
        step_action(raw[from], w[from], raw[static_cast<std::size_t>(l)].p);
  }
  o.total_action = 0.0;
  for (double a : o.step_actions) o.total_action += a;
  return o;
}

std::vector<PeriodicOrbit> enumerate_orbits(int l_max) {
  if (l_max < 1 || l_max > 12) throw std::invalid_argument("enumerate_orbits: l_max must be in [1,12]");
  // Duval's generation of Lyndon words over {0,1,2} with length <= l_max.
  std::vector<std::vector<int>> words;
  std::vector<int> w{0};
  while (!w.empty()) {
    words.push_back(w);
    const std::size_t m = w.size();
    while (w.size() < static_cast<std::size_t>(l_max)) w.push_back(w[w.size() - m]);
    while (!w.empty() && w.back() == 2) w.pop_back();
    if (!w.empty()) ++w.back();
  }
  std::sort(words.begin(), words.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  std::vector<PeriodicOrbit> out;
  out.reserve(words.size());
  for (auto& word : words) out.push_back(orbit_from_symbols(SymbolSequence(std::move(word))));
  return out;
}

double orbit_weight(const PeriodicOrbit& o, double reflectivity) {
  if (reflectivity < 0.0 || reflectivity > 1.0) throw std::invalid_argument("orbit_weight: R outside [0,1]");
  if (o.opening_symbols == 0) return 1.0;
  return std::pow(reflectivity, static_cast<double>(o.opening_symbols) / o.period());
}

int OrbitSelection::outside_count() const {
  return static_cast<int>(std::count_if(ordered_orbits.begin(), ordered_orbits.end(),
                                        [](const PeriodicOrbit& o) { return !o.inside_repeller; }));
}

int OrbitSelection::scar_function_count() const {
  int n = 0;
  for (const auto& o : ordered_orbits) n += o.period();
  return n;
}

OrbitSelection select_orbits(const std::vector<PeriodicOrbit>& all, const SelectionRequest& req) {
  if (req.n_pos < 1) throw std::invalid_argument("select_orbits: n_pos must be >= 1");
  if (req.n_max_out < 0) throw std::invalid_argument("select_orbits: n_max_out must be >= 0");
  if (req.grid_side < 1) throw std::invalid_argument("select_orbits: grid_side must be >= 1");

  auto by_period_then_symbols = [](const PeriodicOrbit* a, const PeriodicOrbit* b) {
    return a->period() != b->period() ? a->period() < b->period() : a->symbols < b->symbols;
  };

  std::vector<const PeriodicOrbit*> inside;
  std::vector<const PeriodicOrbit*> outside;
  for (const auto& o : all) (o.inside_repeller ? inside : outside).push_back(&o);
  std::sort(inside.begin(), inside.end(), by_period_then_symbols);

  // Decreasing R^(n1/L) is increasing n1/L for every R in (0,1); compare the
  // fractions exactly so the admitted set does not depend on R.
  std::sort(outside.begin(), outside.end(), [&](const PeriodicOrbit* a, const PeriodicOrbit* b) {
    const long lhs = static_cast<long>(a->opening_symbols) * b->period();
    const long rhs = static_cast<long>(b->opening_symbols) * a->period();
    if (lhs != rhs) return lhs < rhs;
    return by_period_then_symbols(a, b);
  });
  if (outside.size() > static_cast<std::size_t>(req.n_max_out)) {
    outside.resize(static_cast<std::size_t>(req.n_max_out));
  }

  std::vector<const PeriodicOrbit*> pool = inside;
  pool.insert(pool.end(), outside.begin(), outside.end());

  const int side = req.grid_side;
  auto cells_of = [side](const PeriodicOrbit& o) {
    std::set<int> cells;
    for (const auto& pt : o.points) {
      const int a = std::min(static_cast<int>(pt.q * side), side - 1);
      const int b = std::min(static_cast<int>(pt.p * side), side - 1);
      cells.insert(a * side + b);
    }
    return std::vector<int>(cells.begin(), cells.end());
  };
  std::vector<std::vector<int>> cells(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) cells[i] = cells_of(*pool[i]);

  std::vector<char> covered(static_cast<std::size_t>(side) * side, 0);
  std::vector<char> used(pool.size(), 0);
  OrbitSelection sel;
  sel.n_pos = req.n_pos;
  sel.n_max_out = req.n_max_out;
  sel.l_max = 0;
  for (const auto* o : pool) sel.l_max = std::max(sel.l_max, o->period());

  const std::size_t keep = std::min(pool.size(), static_cast<std::size_t>(req.n_pos));
  for (std::size_t step = 0; step < keep; ++step) {
    std::size_t best = pool.size();
    int best_gain = -1;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (used[i]) continue;
      int gain = 0;
      for (int c : cells[i]) gain += covered[static_cast<std::size_t>(c)] ? 0 : 1;
      // Ties keep pool order: repeller orbits first, then outside orbits by weight.
      if (gain > best_gain) {
        best = i;
        best_gain = gain;
      }
    }
    used[best] = 1;
    for (int c : cells[best]) covered[static_cast<std::size_t>(c)] = 1;
    sel.ordered_orbits.push_back(*pool[best]);
  }
  return sel;
}

}  // namespace tribaker
