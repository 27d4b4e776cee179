#include "tmpcl/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace tmp {

void TrainConfig::validate() const {
  if (epochs < 0) throw std::invalid_argument("train: epochs must be >= 0");
  if (label_interval < 1 || (epochs > 0 && label_interval > epochs)) {
    throw std::invalid_argument("train: need 1 <= label_interval <= epochs");
  }
  if (loss.temperature <= 0.0) {
    throw std::invalid_argument("train: temperature must be positive");
  }
  if (embed_dim < 1) throw std::invalid_argument("train: embed_dim >= 1");
  if (sampler.batch_size < 2) {
    throw std::invalid_argument("train: batch_size must be >= 2");
  }
  if (eval_interval < 0) {
    throw std::invalid_argument("train: eval_interval must be >= 0");
  }
}

Eigen::MatrixXd embed_dataset(const EncoderParams& params, const Dataset& ds,
                              int batch_size) {
  if (static_cast<int>(ds.dim) != params.input_dim()) {
    throw std::invalid_argument("embed_dataset: dim mismatch");
  }
  const int n = static_cast<int>(ds.size());
  Eigen::MatrixXd out(n, params.output_dim());
  const Eigen::MatrixXd features = ds.features();
  for (int start = 0; start < n; start += batch_size) {
    const int count = std::min(batch_size, n - start);
    out.middleRows(start, count) =
        forward(params, features.middleRows(start, count));
  }
  return out;
}

TrainResult run_training(const Dataset& ds, const TrainConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);

  std::vector<int> widths;
  widths.push_back(static_cast<int>(ds.dim));
  widths.insert(widths.end(), cfg.hidden.begin(), cfg.hidden.end());
  widths.push_back(cfg.embed_dim);

  TrainResult result;
  result.params = make_mlp(widths, rng);

  OptimConfig optim = cfg.optim;
  optim.total_epochs = std::max(1, cfg.epochs);

  const Eigen::MatrixXd features = ds.features();
  PseudoLabeling labeling;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (epoch % cfg.label_interval == 0) {
      const Eigen::MatrixXd embeddings = embed_dataset(result.params, ds);
      labeling = generate_labels(embeddings, cfg.generator, cfg.cluster,
                                 cfg.pul, rng);
    }

    const auto batches =
        cfg.sampler.use_pk
            ? pk_sample_epoch(labeling, cfg.sampler, rng)
            : random_sample_epoch(static_cast<int>(ds.size()),
                                  cfg.sampler.batch_size, rng);

    double loss_sum = 0.0;
    long view_count = 0;
    for (const auto& batch : batches) {
      Eigen::MatrixXd raw(batch.size(), ds.dim);
      for (std::size_t t = 0; t < batch.size(); ++t) {
        raw.row(t) = features.row(batch[t]);
      }
      const Views views = make_views(raw, cfg.views, rng);

      ViewBatch vb;
      vb.pair_of = views.pair_of;
      vb.origin.resize(views.pair_of.size());
      vb.labels.resize(views.pair_of.size());
      for (std::size_t t = 0; t < batch.size(); ++t) {
        vb.origin[2 * t] = vb.origin[2 * t + 1] = batch[t];
        vb.labels[2 * t] = vb.labels[2 * t + 1] = labeling.labels[batch[t]];
      }

      ForwardCache cache;
      vb.embeddings = forward(result.params, views.inputs, &cache);
      const LossOutput loss = contrastive_loss(vb, cfg.loss);
      if (!std::isfinite(loss.value)) {
        throw std::runtime_error("training diverged at epoch " +
                                 std::to_string(epoch));
      }
      const ParamGrads grads = backward(result.params, cache, loss.grad);
      const double lr =
          cosine_lr(epoch, optim, static_cast<int>(batch.size()));
      sgd_step(result.params, grads, lr, optim);

      loss_sum += loss.value * static_cast<double>(vb.num_views());
      view_count += vb.num_views();
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.mean_loss = view_count > 0 ? loss_sum / view_count : 0.0;
    rec.lr = cosine_lr(epoch, optim, cfg.sampler.batch_size);
    rec.num_classes = labeling.num_classes;
    rec.num_singletons = labeling.singleton_count();
    if (cfg.eval_interval > 0 && ((epoch + 1) % cfg.eval_interval == 0 ||
                                  epoch + 1 == cfg.epochs)) {
      const EvalSplit split = make_identity_split(ds, cfg.query_fraction);
      const EvalReport report =
          evaluate(embed_dataset(result.params, ds), split, 10);
      rec.map = report.map;
      rec.cmc1 = report.cmc.empty() ? 0.0 : report.cmc[0];
    }
    result.log.epochs.push_back(rec);
  }
  return result;
}

void write_train_log_csv(const TrainLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.precision(17);
  out << "epoch,loss,lr,num_classes,num_singletons,map,cmc1\n";
  for (const auto& rec : log.epochs) {
    out << rec.epoch << "," << rec.mean_loss << "," << rec.lr << ","
        << rec.num_classes << "," << rec.num_singletons << ",";
    if (rec.map) out << *rec.map;
    out << ",";
    if (rec.cmc1) out << *rec.cmc1;
    out << "\n";
  }
}

}  // namespace tmp
