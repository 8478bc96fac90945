#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "wavecrest/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"wavecrest: moving-beamsplitter wave-crest simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(wavecrest::kToolVersion));

  std::string default_out = ".";
  if (const char* env = std::getenv("WAVECREST_OUT")) default_out = env;

  std::string sim_file, sim_out = default_out;
  wavecrest::SimulateOptions sim_opts;
  int substeps = 0;
  double sample_rate = 0.0;
  auto* sim = app.add_subcommand("simulate", "run a scenario file and write CSV outputs");
  sim->add_option("file", sim_file, "scenario file")->required()->check(CLI::ExistingFile);
  sim->add_option("--out", sim_out, "output directory (default $WAVECREST_OUT or .)");
  auto* sub_opt = sim->add_option("--substeps", substeps, "minimum comoving sub-intervals per ramp")
                      ->check(CLI::PositiveNumber);
  auto* rate_opt = sim->add_option("--sample-rate", sample_rate, "detector samples per beat period")
                       ->check(CLI::PositiveNumber);

  auto* chk = app.add_subcommand("check", "verify the closed-form predictions");

  std::string sw_file, sw_param, sw_range, sw_out = default_out;
  auto* sw = app.add_subcommand("sweep", "repeat a scenario over a range of one parameter");
  sw->add_option("file", sw_file, "scenario file")->required()->check(CLI::ExistingFile);
  sw->add_option("--param", sw_param, "dotted key, e.g. beamsplitter.segment.2.duration")->required();
  sw->add_option("--range", sw_range, "start:stop:count")->required();
  sw->add_option("--out", sw_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : wavecrest::kExitValidation;
  }

  if (sim->parsed()) {
    if (*sub_opt) sim_opts.substeps = substeps;
    if (*rate_opt) sim_opts.sample_rate = sample_rate;
    return wavecrest::cmd_simulate(sim_file, sim_out, sim_opts, std::cerr);
  }
  if (chk->parsed()) return wavecrest::cmd_check(std::cout);
  return wavecrest::cmd_sweep(sw_file, sw_param, sw_range, sw_out, std::cerr);
}
