#include <string>

#include "CLI11.hpp"
#include "champ/commands.hpp"
#include "champ/config.hpp"

int main(int argc, char** argv) {
  using namespace champ;
  CLI::App app{"Hardware-aware magnitude pruning for SVD-based coherent photonic neural networks"};
  app.require_subcommand(1);
  app.footer(exit_code_help() + "\nEnvironment:\n  " + std::string(kDataDirEnv) +
             "  overrides data.mnist.dir from the config\n");

  CommandOptions opts;
  std::uint64_t seed = 0;
  int workers = 1;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config, "Experiment config (JSON)");
    sub->add_option("--out", opts.out, "Output directory");
    sub->add_option("--seed", seed, "Override the config seed");
    sub->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  };

  auto* train = app.add_subcommand("train", "Train a network in the phase domain");
  add_common(train);
  train->add_option("--resume", opts.resume, "Continue from a checkpoint");

  auto* champ_cmd = app.add_subcommand("champ", "One-shot + iterative magnitude pruning");
  add_common(champ_cmd);
  champ_cmd->add_option("--checkpoint", opts.checkpoint, "Trained checkpoint")->required();
  champ_cmd->add_flag("--timing", opts.timing, "Record wall-clock times in the report trail");

  auto* mc = app.add_subcommand("mc", "Monte Carlo accuracy under phase noise");
  add_common(mc);
  mc->add_option("--checkpoint", opts.checkpoint, "Checkpoint, optionally carrying a prune mask")->required();

  auto* bma = app.add_subcommand("bma", "Weight sparsity vs. phase sparsity experiment");
  add_common(bma);

  auto* census = app.add_subcommand("census", "Count phase shifters");
  add_common(census);
  census->add_option("--dims", opts.dims, "Layer dimensions, e.g. 64,256,100,10")->delimiter(',');
  census->add_option("--checkpoint", opts.checkpoint, "Count a checkpoint's meshes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  for (auto* sub : {train, champ_cmd, mc, bma, census}) {
    if (sub->count("--seed")) opts.seed = seed;
    if (sub->count("--workers")) opts.workers = workers;
  }

  if (train->parsed()) return run_train(opts);
  if (champ_cmd->parsed()) return run_champ(opts);
  if (mc->parsed()) return run_mc(opts);
  if (bma->parsed()) return run_bma(opts);
  return run_census(opts);
}
