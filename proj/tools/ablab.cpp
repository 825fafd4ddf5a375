// ablab: command-line front end. One subcommand per run type; every run
// writes its artifacts into --out (quantize may skip it).

#include <iostream>

#include <CLI11.hpp>

#include "ablab/run.hpp"

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::string mode;
  int workers{0};
  std::uint64_t seed{0};
  std::string delta_alpha_list;
  std::string species{"deuteron"};
  std::int64_t n_a{0};
  std::int64_t n_b{0};
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Aharonov-Bohm flux lab: holonomy, magnetic translations, wavepacket sweeps"};
  app.require_subcommand(1);
  Flags f;
  std::map<CLI::App*, ablab::cli::Command> commands;

  auto common = [&](CLI::App* sub, ablab::cli::Command cmd) {
    sub->add_option("--config", f.config, "config file (sectioned key = value)")->check(CLI::ExistingFile);
    sub->add_option("--out", f.out, "output directory");
    sub->add_option("--seed", f.seed, "seed for generated cases");
    sub->add_option("--workers", f.workers, "concurrent sweep jobs")->check(CLI::PositiveNumber);
    commands[sub] = cmd;
    return sub;
  };
  using ablab::cli::Command;
  common(app.add_subcommand("holonomy", "line-integral phases vs winding numbers"), Command::Holonomy);
  common(app.add_subcommand("commutator", "magnetic translation commutator phases"), Command::Commutator);
  auto* evolve = common(app.add_subcommand("evolve", "one wavepacket run to the detector"), Command::Evolve);
  auto* sweep = common(app.add_subcommand("sweep", "delta-alpha sweep with fringe fits"), Command::Sweep);
  common(app.add_subcommand("eigen-check", "first-order eigen solutions: residual ladder and witness"),
         Command::EigenCheck);
  auto* quantize = common(app.add_subcommand("quantize", "delta alpha of quantized fluxes"), Command::Quantize);

  for (auto* sub : {evolve, sweep}) {
    sub->add_option("--mode", f.mode, "standard | superseparability" + std::string(sub == sweep ? " | both" : ""));
  }
  sweep->add_option("--delta-alpha-list", f.delta_alpha_list, "comma separated, rationals like 1/4 allowed");
  quantize->add_option("--species", f.species, "deuteron | alpha");
  quantize->add_option("--n-a", f.n_a, "flux quantum number of chamber A")->required();
  quantize->add_option("--n-b", f.n_b, "flux quantum number of chamber B")->required();

  CLI11_PARSE(app, argc, argv);

  ablab::cli::RunManifest m;
  for (const auto& [sub, cmd] : commands) {
    if (sub->parsed()) m.command = cmd;
  }
  auto* sub = app.get_subcommands().front();
  m.config_path = f.config;
  m.output_dir = f.out;
  if (sub->count("--seed")) m.seed = f.seed;
  if (sub->count("--workers")) m.worker_count = f.workers;
  if (!f.mode.empty()) m.mode = f.mode;
  if (!f.delta_alpha_list.empty()) m.delta_alpha_list = f.delta_alpha_list;
  if (m.command == Command::Quantize) {
    m.species = f.species;
    m.n_a = f.n_a;
    m.n_b = f.n_b;
  }

  const auto r = ablab::cli::run(m);
  std::cout << r.stdout_text;
  if (r.exit_code != 0) std::cerr << r.error_json;
  return r.exit_code;
}
