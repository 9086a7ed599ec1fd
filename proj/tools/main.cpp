#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pseudospec/config.hpp"
#include "pseudospec/errors.hpp"
#include "pseudospec/presets.hpp"
#include "pseudospec/run.hpp"
#include "pseudospec/version.hpp"

using namespace pseudospec;

int main(int argc, char** argv) {
  CLI::App app{
      "discrete spectra of flat pseudo-Riemannian tori under deformation, "
      "dense-vs-discrete diagnostics, Cartan-projection properness and "
      "sharpness, and stable eigenvalue sets for anti-de Sitter 3-manifolds"};
  app.set_version_flag("--version",
                       std::string(kToolName) + " " + kVersion);

  std::string target;
  std::string config_file;
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  std::string out_dir;
  bool list_presets = false;

  app.add_option("command", target, "command or preset name");
  app.add_option("--config", config_file,
                 "flat key-value JSON config; a manifest.json replays too");
  app.add_option("--set", overrides,
                 "key=value parameter override, repeatable; wins over the "
                 "config file");
  auto* seed_opt =
      app.add_option("--seed", seed, "seed for randomized sampling");
  auto* out_opt = app.add_option(
      "--out", out_dir,
      "directory receiving result.csv, result.json, manifest.json");
  app.add_flag("--list-presets", list_presets,
               "print the preset registry and exit");
  app.footer("presets: run --list-presets; budget knob: PSEUDOSPEC_BUDGET");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? cli::kOk : cli::kInputError;
  }

  if (list_presets) {
    for (const auto& info : cli::preset_registry())
      std::printf("%-22s %s\n", info.name.c_str(), info.summary.c_str());
    return cli::kOk;
  }

  cli::RunConfig config;
  try {
    if (target.empty())
      throw input_error("missing command; run with --help for usage");
    const auto& commands = cli::command_names();
    if (std::find(commands.begin(), commands.end(), target) !=
        commands.end()) {
      config.command = target;
    } else {
      try {
        config = cli::preset(target);
      } catch (const input_error&) {
        std::string known;
        for (const auto& name : commands) {
          if (!known.empty()) known += ", ";
          known += name;
        }
        throw input_error("unknown command or preset \"" + target +
                          "\"; commands: " + known +
                          "; presets via --list-presets");
      }
    }

    if (!config_file.empty()) {
      const cli::RunConfig file = cli::load_config_file(config_file);
      if (!file.command.empty() && file.command != config.command)
        throw input_error("config file names command \"" + file.command +
                          "\" but the command line says \"" + config.command +
                          "\"");
      for (const auto& [key, value] : file.parameters)
        config.parameters[key] = value;
      if (file.seed != 0) config.seed = file.seed;
      if (file.output_path != ".") config.output_path = file.output_path;
    }
    for (const auto& text : overrides) cli::apply_override(config, text);
    if (seed_opt->count()) config.seed = seed;
    if (out_opt->count()) config.output_path = out_dir;
  } catch (const input_error& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return cli::kInputError;
  }

  std::string error;
  const int rc = cli::run(config, &error);
  if (!error.empty()) std::fprintf(stderr, "%s\n", error.c_str());
  return rc;
}
