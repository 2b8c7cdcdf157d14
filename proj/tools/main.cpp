#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "app/commands.hpp"
#include "app/config.hpp"

namespace app = tribaker::app;

namespace {

struct FlagValues {
  std::map<std::string, std::string> values;
  std::string config_file;
  std::string preset;
  bool large = false;
};

void add_common_flags(CLI::App* cmd, FlagValues& f) {
  static const std::pair<const char*, const char*> kFlags[] = {
      {"n", "Hilbert-space dimension N (multiple of 3)"},
      {"r", "Reflectivity, or a comma-separated list"},
      {"lmax", "Longest orbit period"},
      {"nc", "Number of long-lived resonances"},
      {"eps", "Matching radius for the performance"},
      {"target-p", "Performance target for the minimal basis"},
      {"nmax-out", "Outside-orbit budget (overrides the policy list)"},
      {"grid", "Grid side for measures or images"},
      {"samples", "Monte-Carlo samples per measure"},
      {"seed", "64-bit seed"},
      {"out", "Output directory"},
      {"jobs", "Worker threads for independent jobs"},
  };
  for (const auto& [name, help] : kFlags) {
    cmd->add_option(std::string("--") + name, f.values[name], help);
  }
  cmd->add_option("--config", f.config_file, "key=value configuration file");
  cmd->add_option("--preset", f.preset, "Named preset (fig1, fig2, fig3, fig4, large, quick)");
  cmd->add_flag("--large", f.large, "Allow N > 243 and run the large-N spot check");
}

// Settings in precedence order: --preset, then the config file, then flags.
app::Overrides collect(const CLI::App* cmd, const FlagValues& f) {
  app::Overrides out;
  if (!f.preset.empty()) out.emplace_back("preset", f.preset);
  if (!f.config_file.empty()) {
    for (auto& kv : app::read_settings(f.config_file)) out.push_back(std::move(kv));
  }
  for (const auto& [name, value] : f.values) {
    if (cmd->count("--" + name) > 0) out.emplace_back(name, value);
  }
  if (f.large) out.emplace_back("large", "1");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Semiclassical scar-function analysis of the partially open tribaker map"};
  cli.require_subcommand(1);

  FlagValues flags;
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, help] : std::map<std::string, std::string>{
           {"measure", "Finite-time classical intensity measures"},
           {"spectrum", "Exact resonances of the open quantum map"},
           {"orbits", "Periodic-orbit census and selections"},
           {"sweep", "Minimal scar bases across reflectivities and policies"},
           {"repeller", "Exact vs semiclassical partial quantum repeller"},
           {"reproduce-paper", "Every figure at its preset"}}) {
    subs[name] = cli.add_subcommand(name, help);
    add_common_flags(subs[name], flags);
  }

  CLI11_PARSE(cli, argc, argv);

  try {
    for (const auto& [name, sub] : subs) {
      if (!sub->parsed()) continue;
      const app::Overrides overrides = collect(sub, flags);
      if (name == "reproduce-paper") {
        app::cmd_reproduce(overrides);
        continue;
      }
      const app::RunConfig cfg = app::make_config(app::default_preset(name), overrides);
      if (name == "measure") {
        app::cmd_measure(cfg);
      } else if (name == "spectrum") {
        app::cmd_spectrum(cfg);
      } else if (name == "orbits") {
        app::cmd_orbits(cfg);
      } else if (name == "sweep") {
        // With --large the sweep pairs each R with one policy (the spot check).
        if (flags.large) {
          app::cmd_large(cfg);
        } else {
          app::cmd_sweep(cfg);
        }
      } else if (name == "repeller") {
        app::cmd_repeller(cfg);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
