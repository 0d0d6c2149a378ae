// jnr: synthetic data generation, keyframe identification, training,
// evaluation and the KfID ablation.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "jnr/pipeline/commands.hpp"
#include "jnr/simd/kernels.hpp"

namespace fs = std::filesystem;

namespace {

struct Flags {
  std::string config;
  std::string data;
  std::string out;
  std::string checkpoint;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "configuration file (key = value)");
  cmd->add_option("--seed", f.seed, "overrides every seed in the configuration");
}

jnr::RunConfig load(const Flags& f) {
  jnr::RunConfig cfg = jnr::load_config_or_default(f.config);
  if (f.seed) jnr::override_seed(cfg, *f.seed);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Jersey number recognition with keyframe identification"};
  app.require_subcommand(1);
  Flags f;

  auto* synth = app.add_subcommand("synth", "generate a synthetic tracklet dataset");
  add_common(synth, f);
  synth->add_option("--out", f.out, "output dataset directory")->required();

  auto* kfid = app.add_subcommand("kfid", "run keyframe identification and report frame reduction");
  add_common(kfid, f);
  kfid->add_option("--data", f.data, "dataset directory")->required();
  kfid->add_option("--out", f.out, "output directory")->required();

  auto* train = app.add_subcommand("train", "train the classifier on the training split");
  add_common(train, f);
  train->add_option("--data", f.data, "dataset directory")->required();
  train->add_option("--checkpoint", f.checkpoint, "checkpoint to write")->required();
  train->add_option("--out", f.out, "metrics log path (default <checkpoint>.metrics.csv)");

  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on the evaluation split");
  add_common(eval, f);
  eval->add_option("--data", f.data, "dataset directory")->required();
  eval->add_option("--checkpoint", f.checkpoint, "checkpoint to load")->required();
  eval->add_option("--out", f.out, "report directory (default: checkpoint directory)");

  auto* ablate = app.add_subcommand("ablate", "train and evaluate with KfID on and off");
  add_common(ablate, f);
  ablate->add_option("--data", f.data, "dataset directory")->required();
  ablate->add_option("--out", f.out, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const jnr::RunConfig cfg = load(f);
    std::clog << "simd: " << jnr::simd::isa_name(jnr::simd::active_isa()) << '\n';
    if (synth->parsed()) {
      jnr::cmd_synth(cfg, f.out, std::cout);
    } else if (kfid->parsed()) {
      jnr::cmd_kfid(cfg, f.data, f.out, std::cout);
    } else if (train->parsed()) {
      jnr::cmd_train(cfg, f.data, f.checkpoint, f.out, std::cout);
    } else if (eval->parsed()) {
      jnr::cmd_eval(cfg, f.data, f.checkpoint, f.out, std::cout);
    } else if (ablate->parsed()) {
      jnr::cmd_ablate(cfg, f.data, f.out, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "jnr: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
