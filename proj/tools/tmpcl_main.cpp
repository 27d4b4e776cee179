// Command-line front end: synthetic data generation, training, retrieval
// evaluation, and single-parameter sweeps emitting CSV rows.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tmpcl/config.hpp"
#include "tmpcl/dataset.hpp"
#include "tmpcl/eval.hpp"
#include "tmpcl/pipeline.hpp"

namespace {

// Keys settable via `--set key=value`, applied after the config file.
void apply_overrides(tmp::RunConfig& cfg,
                     const std::vector<std::string>& overrides) {
  for (const auto& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("--set expects key=value, got: " + item);
    }
    cfg.apply(item.substr(0, eq), item.substr(eq + 1));
  }
}

struct TrainFlags {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string mode, labels, sampler;
  double tau = -1.0, epsilon = -1.0, lambda = -2.0;
  int epochs = -1, interval = -1, batch = -1, k = -1, eval_every = -1;
  long long seed = -1;
};

void add_train_flags(CLI::App* cmd, TrainFlags& f) {
  cmd->add_option("--config", f.config_path, "key = value config file");
  cmd->add_option("--set", f.overrides,
                  "override any config key, e.g. --set noise_std=0.1");
  cmd->add_option("--mode", f.mode, "loss mode: tmp|scl|instance");
  cmd->add_option("--tau", f.tau, "softmax temperature");
  cmd->add_option("--epsilon", f.epsilon, "DBSCAN neighborhood radius");
  cmd->add_option("--interval,-E", f.interval, "label generation interval");
  cmd->add_option("--epochs", f.epochs, "training epochs");
  cmd->add_option("--batch", f.batch, "batch size N");
  cmd->add_option("-K", f.k, "instances per class in PK batches");
  cmd->add_option("--sampler", f.sampler, "pk|random");
  cmd->add_option("--labels", f.labels, "label generator: dbscan|pul");
  cmd->add_option("--lambda", f.lambda, "PUL reliability threshold");
  cmd->add_option("--seed", f.seed, "RNG seed");
  cmd->add_option("--eval-every", f.eval_every,
                  "evaluate every this many epochs (0 = never)");
}

void apply_train_flags(tmp::RunConfig& cfg, const TrainFlags& f) {
  if (!f.config_path.empty()) tmp::apply_config_file(cfg, f.config_path);
  apply_overrides(cfg, f.overrides);
  if (!f.mode.empty()) cfg.apply("mode", f.mode);
  if (!f.labels.empty()) cfg.apply("labels", f.labels);
  if (!f.sampler.empty()) cfg.apply("sampler", f.sampler);
  if (f.tau >= 0.0) cfg.train.loss.temperature = f.tau;
  if (f.epsilon >= 0.0) cfg.train.cluster.epsilon = f.epsilon;
  if (f.lambda > -2.0) cfg.train.pul.reliability = f.lambda;
  if (f.epochs >= 0) cfg.train.epochs = f.epochs;
  if (f.interval >= 1) cfg.train.label_interval = f.interval;
  if (f.batch >= 1) cfg.train.sampler.batch_size = f.batch;
  if (f.k >= 1) cfg.train.sampler.k = f.k;
  if (f.seed >= 0) cfg.train.seed = static_cast<std::uint64_t>(f.seed);
  if (f.eval_every >= 0) cfg.train.eval_interval = f.eval_every;
  if (cfg.train.loss.temperature <= 0.0) {
    throw std::invalid_argument("tau must be positive");
  }
}

tmp::EvalReport evaluate_params(const tmp::EncoderParams& params,
                                const tmp::Dataset& ds, double query_fraction,
                                int max_rank) {
  const tmp::EvalSplit split = tmp::make_identity_split(ds, query_fraction);
  return tmp::evaluate(tmp::embed_dataset(params, ds), split, max_rank);
}

int cmd_gen_data(const tmp::SynthConfig& synth, long long seed,
                 const std::string& out_path) {
  tmp::Rng rng(static_cast<std::uint64_t>(seed));
  const tmp::Dataset ds = tmp::generate_synthetic(synth, rng);
  tmp::save_dataset(ds, out_path);
  std::cout << "wrote " << out_path << ": n=" << ds.size() << " D=" << ds.dim
            << " ids=" << synth.num_identities
            << " cameras=" << ds.num_cameras << "\n";
  return 0;
}

int cmd_train(const std::string& data_path, const tmp::RunConfig& cfg,
              const std::string& log_path, const std::string& ckpt_path) {
  const tmp::Dataset ds = tmp::load_dataset(data_path);
  const tmp::TrainResult result = tmp::run_training(ds, cfg.train);
  if (!log_path.empty()) tmp::write_train_log_csv(result.log, log_path);
  if (!ckpt_path.empty()) tmp::save_checkpoint(result.params, ckpt_path);

  if (!result.log.epochs.empty()) {
    const auto& last = result.log.epochs.back();
    std::cout << "final epoch " << last.epoch << ": loss=" << last.mean_loss
              << " classes=" << last.num_classes
              << " singletons=" << last.num_singletons;
    if (last.map) std::cout << " map=" << *last.map;
    std::cout << "\n";
    // The paper reports best-epoch numbers alongside final ones.
    const tmp::EpochRecord* best = nullptr;
    for (const auto& rec : result.log.epochs) {
      if (rec.map && (!best || *rec.map > *best->map)) best = &rec;
    }
    if (best) {
      std::cout << "best epoch " << best->epoch << ": map=" << *best->map
                << " cmc1=" << *best->cmc1 << "\n";
    }
  } else {
    std::cout << "no epochs run\n";
  }
  return 0;
}

int cmd_eval(const std::string& ckpt_path, const std::string& data_path,
             double query_fraction, int max_rank,
             const std::string& out_path) {
  const tmp::Dataset ds = tmp::load_dataset(data_path);
  const tmp::EncoderParams params = tmp::load_checkpoint(ckpt_path);
  const tmp::EvalReport report =
      evaluate_params(params, ds, query_fraction, max_rank);
  if (!out_path.empty()) tmp::write_report_csv(report, out_path);
  std::cout << "map=" << report.map
            << " cmc1=" << (report.cmc.empty() ? 0.0 : report.cmc[0])
            << " evaluated=" << report.num_evaluated
            << " skipped=" << report.num_skipped << "\n";
  return 0;
}

int cmd_sweep(const std::string& data_path, const tmp::RunConfig& base,
              const std::string& param, const std::string& values_csv,
              int max_rank, const std::string& out_path) {
  std::vector<std::string> values;
  std::stringstream ss(values_csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) values.push_back(item);
  }
  if (values.empty()) throw std::invalid_argument("sweep: no values given");

  const tmp::Dataset ds = tmp::load_dataset(data_path);

  std::ofstream out;
  if (!out_path.empty()) {
    out.open(out_path);
    if (!out) throw std::runtime_error("cannot open for writing: " + out_path);
    out.precision(17);
  }
  const std::string header =
      "param,value,status,map,cmc1,num_classes,num_singletons,final_loss";
  if (out.is_open()) out << header << "\n";
  std::cout << header << "\n";

  for (const auto& value : values) {
    std::ostringstream row;
    row.precision(17);
    row << param << "," << value << ",";
    try {
      tmp::RunConfig cfg = base;
      cfg.apply(param, value);
      const tmp::TrainResult result = tmp::run_training(ds, cfg.train);
      const tmp::EvalReport report = evaluate_params(
          result.params, ds, cfg.train.query_fraction, max_rank);
      const auto& last = result.log.epochs.back();
      row << "ok," << report.map << ","
          << (report.cmc.empty() ? 0.0 : report.cmc[0]) << ","
          << last.num_classes << "," << last.num_singletons << ","
          << last.mean_loss;
    } catch (const std::exception& e) {
      // Record the failure and keep sweeping.
      row << "error: " << e.what() << ",,,,";
    }
    if (out.is_open()) out << row.str() << "\n";
    std::cout << row.str() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unsupervised contrastive training on vector datasets: "
               "pseudo-label clustering, positive-aware losses, PK sampling, "
               "and retrieval evaluation"};
  app.require_subcommand(1);

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "generate a synthetic dataset");
  tmp::SynthConfig synth;
  long long gen_seed = 0;
  std::string gen_out;
  gen->add_option("--ids", synth.num_identities, "number of identities");
  gen->add_option("--per-id", synth.samples_per_identity, "samples per identity");
  gen->add_option("--dim", synth.dim, "feature dimension");
  gen->add_option("--cameras", synth.num_cameras, "number of cameras");
  gen->add_option("--noise", synth.within_identity_noise, "within-identity noise std");
  gen->add_option("--camera-offset", synth.camera_offset_scale, "camera offset scale");
  gen->add_option("--seed", gen_seed, "RNG seed");
  gen->add_option("--out", gen_out, "output dataset path")->required();

  // train
  auto* train = app.add_subcommand("train", "run the training loop");
  TrainFlags tf;
  std::string train_data, train_log, train_ckpt;
  train->add_option("--data", train_data, "dataset file")->required();
  add_train_flags(train, tf);
  train->add_option("--out-log", train_log, "training log CSV path");
  train->add_option("--out-ckpt", train_ckpt, "checkpoint output path");

  // eval
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  std::string eval_ckpt, eval_data, eval_out;
  double eval_qf = 0.25;
  int eval_max_rank = 10;
  eval->add_option("--ckpt", eval_ckpt, "checkpoint file")->required();
  eval->add_option("--data", eval_data, "dataset file")->required();
  eval->add_option("--query-fraction", eval_qf, "per-identity query fraction");
  eval->add_option("--max-rank", eval_max_rank, "CMC rank cutoff");
  eval->add_option("--out", eval_out, "report CSV path");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "train+eval over one parameter grid");
  TrainFlags sf;
  std::string sweep_data, sweep_param, sweep_values, sweep_out;
  int sweep_max_rank = 10;
  sweep->add_option("--data", sweep_data, "dataset file")->required();
  add_train_flags(sweep, sf);
  sweep->add_option("--param", sweep_param, "config key to sweep")->required();
  sweep->add_option("--values", sweep_values, "comma-separated values")->required();
  sweep->add_option("--max-rank", sweep_max_rank, "CMC rank cutoff");
  sweep->add_option("--out", sweep_out, "stacked CSV output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gen->parsed()) return cmd_gen_data(synth, gen_seed, gen_out);
    if (train->parsed()) {
      tmp::RunConfig cfg;
      apply_train_flags(cfg, tf);
      return cmd_train(train_data, cfg, train_log, train_ckpt);
    }
    if (eval->parsed()) {
      return cmd_eval(eval_ckpt, eval_data, eval_qf, eval_max_rank, eval_out);
    }
    if (sweep->parsed()) {
      tmp::RunConfig cfg;
      apply_train_flags(cfg, sf);
      return cmd_sweep(sweep_data, cfg, sweep_param, sweep_values,
                       sweep_max_rank, sweep_out);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
