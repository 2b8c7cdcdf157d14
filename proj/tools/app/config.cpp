#include "config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "tribaker/io.hpp"

namespace tribaker::app {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T v{};
  const std::string t = trim(text);
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw std::invalid_argument("config: bad value for " + key + ": '" + text + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
  if (t == "0" || t == "false" || t == "no" || t == "off") return false;
  throw std::invalid_argument("config: bad boolean for " + key + ": '" + text + "'");
}

}  // namespace

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(parse_number<double>("list", item));
  }
  return out;
}

void RunConfig::validate() const {
  if (n_dim < 3 || n_dim % 3 != 0) throw std::invalid_argument("config: n must be a positive multiple of 3");
  for (double r : reflectivities) {
    if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("config: every R must lie in [0,1]");
  }
  if (l_max < 1 || l_max > 12) throw std::invalid_argument("config: lmax must be in 1..12");
  if (n_c < 1 || n_c > n_dim) throw std::invalid_argument("config: nc must be in 1..n");
  if (!(eps > 0.0)) throw std::invalid_argument("config: eps must be positive");
  if (!(target_p > 0.0 && target_p <= 1.0)) throw std::invalid_argument("config: target-p must be in (0,1]");
  if (n_max_out < -1) throw std::invalid_argument("config: nmax-out must be >= 0");
  for (int p : policies) {
    if (p < 0) throw std::invalid_argument("config: policies must be >= 0");
  }
  if (grid < 0 || cover_grid < 1) throw std::invalid_argument("config: grid sizes must be positive");
  if (time < 1) throw std::invalid_argument("config: time must be >= 1");
  if (samples == 0) throw std::invalid_argument("config: samples must be positive");
  if (tau < 0) throw std::invalid_argument("config: tau must be >= 0");
  if (scan_stride < 1) throw std::invalid_argument("config: scan_stride must be >= 1");
  if (n_dim > 243 && !large) throw std::invalid_argument("config: n > 243 requires --large");
  if (jobs < 1) throw std::invalid_argument("config: jobs must be >= 1");
}

void apply_setting(RunConfig& cfg, const std::string& raw_key, const std::string& value) {
  std::string key = trim(raw_key);
  for (char& c : key) {
    if (c == '-') c = '_';
  }
  if (key == "n") cfg.n_dim = parse_number<int>(key, value);
  else if (key == "r") cfg.reflectivities = parse_list(value);
  else if (key == "lmax") cfg.l_max = parse_number<int>(key, value);
  else if (key == "nc") cfg.n_c = parse_number<int>(key, value);
  else if (key == "eps") cfg.eps = parse_number<double>(key, value);
  else if (key == "target_p") cfg.target_p = parse_number<double>(key, value);
  else if (key == "nmax_out") cfg.n_max_out = parse_number<int>(key, value);
  else if (key == "policies") {
    cfg.policies.clear();
    for (double p : parse_list(value)) cfg.policies.push_back(static_cast<int>(p));
  } else if (key == "grid") cfg.grid = parse_number<int>(key, value);
  else if (key == "cover_grid") cfg.cover_grid = parse_number<int>(key, value);
  else if (key == "time") cfg.time = parse_number<int>(key, value);
  else if (key == "samples") cfg.samples = parse_number<std::uint64_t>(key, value);
  else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "tau") cfg.tau = parse_number<int>(key, value);
  else if (key == "svd_tol") cfg.svd_tol = parse_number<double>(key, value);
  else if (key == "scan_stride") cfg.scan_stride = parse_number<int>(key, value);
  else if (key == "out") cfg.out = trim(value);
  else if (key == "jobs") cfg.jobs = parse_number<int>(key, value);
  else if (key == "large") cfg.large = parse_bool(key, value);
  else if (key == "preset") apply_preset(cfg, trim(value));
  else throw std::invalid_argument("config: unknown key '" + raw_key + "'");
}

Settings read_settings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot read " + path.string());
  Settings out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: " + path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    }
    out.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return out;
}

void apply_file(RunConfig& cfg, const std::filesystem::path& path) {
  for (const auto& [k, v] : read_settings(path)) apply_setting(cfg, k, v);
}

const std::map<std::string, std::map<std::string, std::string>>& presets() {
  static const std::map<std::string, std::map<std::string, std::string>> table = {
      {"fig1", {{"r", "0,0.01,0.07,0.2"}, {"grid", "243"}, {"time", "10"}, {"samples", "10000000"}}},
      {"fig2", {{"r", "0.07,0.2"}, {"grid", "128"}}},
      {"fig3",
       {{"r", "0.001,0.005,0.01,0.03,0.07,0.1,0.2,0.3,0.35,0.4"}, {"policies", "0,5,50"}, {"lmax", "7"}}},
      {"fig4", {{"r", "0.07,0.2"}, {"grid", "128"}, {"nc", "60"}}},
      {"large", {{"n", "729"}, {"r", "0.01,0.1"}, {"lmax", "9"}, {"nc", "60"}, {"large", "1"}}},
      {"quick", {{"n", "81"}, {"lmax", "5"}, {"nc", "20"}, {"samples", "100000"}, {"grid", "81"}}},
  };
  return table;
}

void apply_preset(RunConfig& cfg, const std::string& name) {
  const auto it = presets().find(name);
  if (it == presets().end()) throw std::invalid_argument("config: unknown preset '" + name + "'");
  for (const auto& [k, v] : it->second) apply_setting(cfg, k, v);
}

std::string describe(const RunConfig& cfg) {
  std::ostringstream os;
  auto list = [](const auto& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i) s += ',';
      if constexpr (std::is_same_v<std::decay_t<decltype(xs[0])>, double>) {
        s += io::fmt_double(xs[i]);
      } else {
        s += std::to_string(xs[i]);
      }
    }
    return s;
  };
  os << "n=" << cfg.n_dim << "\n"
     << "r=" << list(cfg.reflectivities) << "\n"
     << "lmax=" << cfg.l_max << "\n"
     << "nc=" << cfg.n_c << "\n"
     << "eps=" << io::fmt_double(cfg.eps) << "\n"
     << "target_p=" << io::fmt_double(cfg.target_p) << "\n"
     << "nmax_out=" << cfg.n_max_out << "\n"
     << "policies=" << list(cfg.policies) << "\n"
     << "grid=" << cfg.grid << "\n"
     << "cover_grid=" << cfg.cover_grid << "\n"
     << "time=" << cfg.time << "\n"
     << "samples=" << cfg.samples << "\n"
     << "seed=" << cfg.seed << "\n"
     << "tau=" << cfg.tau << "\n"
     << "svd_tol=" << io::fmt_double(cfg.svd_tol) << "\n"
     << "scan_stride=" << cfg.scan_stride << "\n";
  return os.str();
}

}  // namespace tribaker::app
