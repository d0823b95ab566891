#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "frontload/frontload.hpp"

using namespace frontload;

namespace {

struct Options {
  std::string config;
  std::optional<int> digits;
  std::string out = "runs";
  bool paper_scale = false;
};

int run(Scenario s, const Options& o) {
  ExperimentConfig cfg = o.config.empty() ? make_config(s, {}, o.paper_scale)
                                          : load_config(s, o.config, o.paper_scale);
  cfg.digits = o.digits;
  cfg.output_dir = o.out;
  RunManifest m = run_scenario(cfg);
  for (const auto& a : m.assertions) {
    std::cout << (a.pass ? "PASS " : "FAIL ") << a.name;
    if (!a.detail.empty()) std::cout << "  " << a.detail;
    std::cout << "\n";
  }
  std::cout << "manifest: " << (cfg.output_dir / "manifest.txt").string() << "  (" << m.wall_seconds << " s)\n";
  return m.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Front-loaded pulse reshaping experiments"};
  app.require_subcommand(1);
  Options o;
  int status = 0;
  for (Scenario s : {Scenario::fig3, Scenario::fig4, Scenario::cut_pulse, Scenario::encode_demo, Scenario::hartman,
                     Scenario::window_scan}) {
    auto* sub = app.add_subcommand(scenario_name(s), "run the " + scenario_name(s) + " scenario");
    sub->add_option("--config", o.config, "flat key=value parameter file")->check(CLI::ExistingFile);
    sub->add_option("--digits", o.digits, "working precision in decimal digits");
    sub->add_option("--out", o.out, "output directory")->capture_default_str();
    sub->add_flag("--paper-scale", o.paper_scale, "use the full-size parameter set");
    sub->callback([s, &o, &status] {
      try {
        status = run(s, o);
      } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        status = 2;
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        status = 2;
      }
    });
  }
  CLI11_PARSE(app, argc, argv);
  return status;
}
