// nlbe solve|mc|validate|sweep --config <path> --out <dir> [--seed <int>]

#include <chrono>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nlbe.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Collision-induced breakage: sectional solver, particle oracle, diagnostics"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  for (const char* name : {"solve", "mc", "validate", "sweep"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "YAML run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory")->required();
    sub->add_option("--seed", seed, "overrides the config seed");
  }
  CLI11_PARSE(app, argc, argv);

  const auto mode = nlbe::mode_from_name(app.get_subcommands().front()->get_name());
  try {
    auto cfg = nlbe::load_config(config_path, mode);
    if (seed) cfg.seed = *seed;
    const auto t0 = std::chrono::steady_clock::now();
    const auto res = nlbe::run_command(*mode, cfg, out_dir);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (const auto& c : res.report.checks)
      std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << "  observed=" << nlbe::format_double(c.observed)
                << "  bound=" << nlbe::format_double(c.bound) << (c.note.empty() ? "" : "  (" + c.note + ")")
                << '\n';
    for (const auto& n : res.notes) std::cout << "note: " << n << '\n';
    std::cerr << "wall time " << secs << " s\n";
    return res.exit_code;
  } catch (const nlbe::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const nlbe::UnsupportedOperation& e) {
    std::cerr << "refused: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
}
