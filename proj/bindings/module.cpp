// Python bindings for the main operations: synthetic data, losses, label
// generation, sampling, evaluation, and the training loop.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tmpcl/config.hpp"
#include "tmpcl/dataset.hpp"
#include "tmpcl/encoder.hpp"
#include "tmpcl/eval.hpp"
#include "tmpcl/labelgen.hpp"
#include "tmpcl/loss.hpp"
#include "tmpcl/pipeline.hpp"
#include "tmpcl/sampler.hpp"

namespace py = pybind11;

PYBIND11_MODULE(_tmpcl, m) {
  m.doc() = "Unsupervised contrastive learning with pseudo-label clustering";

  py::class_<tmp::Rng>(m, "Rng").def(py::init<std::uint64_t>());

  py::class_<tmp::SampleRecord>(m, "SampleRecord")
      .def_readonly("raw_feature", &tmp::SampleRecord::raw_feature)
      .def_readonly("true_identity", &tmp::SampleRecord::true_identity)
      .def_readonly("camera_id", &tmp::SampleRecord::camera_id);

  py::class_<tmp::Dataset>(m, "Dataset")
      .def_readonly("samples", &tmp::Dataset::samples)
      .def_readonly("dim", &tmp::Dataset::dim)
      .def_readonly("num_cameras", &tmp::Dataset::num_cameras)
      .def("__len__", &tmp::Dataset::size)
      .def("features", &tmp::Dataset::features);

  py::class_<tmp::SynthConfig>(m, "SynthConfig")
      .def(py::init<>())
      .def_readwrite("num_identities", &tmp::SynthConfig::num_identities)
      .def_readwrite("samples_per_identity", &tmp::SynthConfig::samples_per_identity)
      .def_readwrite("dim", &tmp::SynthConfig::dim)
      .def_readwrite("num_cameras", &tmp::SynthConfig::num_cameras)
      .def_readwrite("within_identity_noise", &tmp::SynthConfig::within_identity_noise)
      .def_readwrite("camera_offset_scale", &tmp::SynthConfig::camera_offset_scale);

  m.def("generate_synthetic", [](const tmp::SynthConfig& cfg, std::uint64_t seed) {
    tmp::Rng rng(seed);
    return tmp::generate_synthetic(cfg, rng);
  }, py::arg("config"), py::arg("seed") = 0);
  m.def("save_dataset", &tmp::save_dataset);
  m.def("load_dataset", &tmp::load_dataset);

  py::enum_<tmp::LossMode>(m, "LossMode")
      .value("TMP", tmp::LossMode::kTmp)
      .value("SCL", tmp::LossMode::kScl)
      .value("INSTANCE", tmp::LossMode::kInstance);

  py::class_<tmp::LossConfig>(m, "LossConfig")
      .def(py::init<>())
      .def_readwrite("temperature", &tmp::LossConfig::temperature)
      .def_readwrite("mode", &tmp::LossConfig::mode);

  py::class_<tmp::ViewBatch>(m, "ViewBatch")
      .def(py::init<>())
      .def_readwrite("embeddings", &tmp::ViewBatch::embeddings)
      .def_readwrite("origin", &tmp::ViewBatch::origin)
      .def_readwrite("labels", &tmp::ViewBatch::labels)
      .def_readwrite("pair_of", &tmp::ViewBatch::pair_of);

  py::class_<tmp::LossOutput>(m, "LossOutput")
      .def_readonly("value", &tmp::LossOutput::value)
      .def_readonly("grad", &tmp::LossOutput::grad);

  m.def("cosine_sim", &tmp::cosine_sim);
  m.def("contrastive_loss", &tmp::contrastive_loss);

  py::class_<tmp::ClusterConfig>(m, "ClusterConfig")
      .def(py::init<>())
      .def_readwrite("epsilon", &tmp::ClusterConfig::epsilon)
      .def_readwrite("min_samples", &tmp::ClusterConfig::min_samples)
      .def_readwrite("k1", &tmp::ClusterConfig::k1)
      .def_readwrite("k2", &tmp::ClusterConfig::k2);

  py::class_<tmp::PulConfig>(m, "PulConfig")
      .def(py::init<>())
      .def_readwrite("k_means_k", &tmp::PulConfig::k_means_k)
      .def_readwrite("reliability", &tmp::PulConfig::reliability)
      .def_readwrite("max_iters", &tmp::PulConfig::max_iters)
      .def_readwrite("restarts", &tmp::PulConfig::restarts);

  py::class_<tmp::PseudoLabeling>(m, "PseudoLabeling")
      .def_readonly("labels", &tmp::PseudoLabeling::labels)
      .def_readonly("num_classes", &tmp::PseudoLabeling::num_classes)
      .def_readonly("is_singleton", &tmp::PseudoLabeling::is_singleton)
      .def("singleton_count", &tmp::PseudoLabeling::singleton_count);

  m.def("jaccard_distance", &tmp::jaccard_distance);
  m.def("dbscan", &tmp::dbscan);
  m.def("assign_pseudo_labels", &tmp::assign_pseudo_labels);
  m.def("pul_labels", [](const Eigen::MatrixXd& emb, const tmp::PulConfig& cfg,
                         std::uint64_t seed) {
    tmp::Rng rng(seed);
    return tmp::pul_labels(emb, cfg, rng);
  }, py::arg("embeddings"), py::arg("config"), py::arg("seed") = 0);

  m.def("generate_labels", [](const Eigen::MatrixXd& emb,
                              tmp::LabelGenerator generator,
                              const tmp::ClusterConfig& cluster,
                              const tmp::PulConfig& pul, std::uint64_t seed) {
    tmp::Rng rng(seed);
    return tmp::generate_labels(emb, generator, cluster, pul, rng);
  }, py::arg("embeddings"), py::arg("generator"), py::arg("cluster"),
        py::arg("pul"), py::arg("seed") = 0);

  py::register_exception<tmp::ProtocolError>(m, "ProtocolError");

  py::class_<tmp::EvalSplit>(m, "EvalSplit")
      .def(py::init<>())
      .def_readwrite("query", &tmp::EvalSplit::query)
      .def_readwrite("gallery", &tmp::EvalSplit::gallery)
      .def_readwrite("identity", &tmp::EvalSplit::identity)
      .def_readwrite("camera", &tmp::EvalSplit::camera);

  py::class_<tmp::EvalReport>(m, "EvalReport")
      .def_readonly("map", &tmp::EvalReport::map)
      .def_readonly("cmc", &tmp::EvalReport::cmc)
      .def_readonly("num_evaluated", &tmp::EvalReport::num_evaluated)
      .def_readonly("num_skipped", &tmp::EvalReport::num_skipped);

  m.def("pairwise_euclidean_normed", &tmp::pairwise_euclidean_normed);
  m.def("average_precision", &tmp::average_precision);
  m.def("evaluate", &tmp::evaluate, py::arg("embeddings"), py::arg("split"),
        py::arg("max_rank") = 10);
  m.def("make_identity_split", &tmp::make_identity_split, py::arg("dataset"),
        py::arg("query_fraction") = 0.25);

  py::class_<tmp::SamplerConfig>(m, "SamplerConfig")
      .def(py::init<>())
      .def_readwrite("batch_size", &tmp::SamplerConfig::batch_size)
      .def_readwrite("k", &tmp::SamplerConfig::k)
      .def_readwrite("use_pk", &tmp::SamplerConfig::use_pk);

  py::class_<tmp::ViewConfig>(m, "ViewConfig")
      .def(py::init<>())
      .def_readwrite("noise_std", &tmp::ViewConfig::noise_std)
      .def_readwrite("mask_prob", &tmp::ViewConfig::mask_prob)
      .def_readwrite("scale_jitter", &tmp::ViewConfig::scale_jitter);

  py::class_<tmp::Views>(m, "Views")
      .def_readonly("inputs", &tmp::Views::inputs)
      .def_readonly("pair_of", &tmp::Views::pair_of);

  m.def("make_views", [](const Eigen::MatrixXd& raw, const tmp::ViewConfig& cfg,
                         std::uint64_t seed) {
    tmp::Rng rng(seed);
    return tmp::make_views(raw, cfg, rng);
  }, py::arg("raw_features"), py::arg("config"), py::arg("seed") = 0);

  m.def("pk_sample_epoch", [](const tmp::PseudoLabeling& labeling,
                              const tmp::SamplerConfig& cfg,
                              std::uint64_t seed) {
    tmp::Rng rng(seed);
    return tmp::pk_sample_epoch(labeling, cfg, rng);
  }, py::arg("labeling"), py::arg("config"), py::arg("seed") = 0);
  m.def("random_sample_epoch", [](int n, int batch_size, std::uint64_t seed) {
    tmp::Rng rng(seed);
    return tmp::random_sample_epoch(n, batch_size, rng);
  }, py::arg("n"), py::arg("batch_size"), py::arg("seed") = 0);

  py::enum_<tmp::LabelGenerator>(m, "LabelGenerator")
      .value("DBSCAN", tmp::LabelGenerator::kDbscan)
      .value("PUL", tmp::LabelGenerator::kPul);

  py::class_<tmp::OptimConfig>(m, "OptimConfig")
      .def(py::init<>())
      .def_readwrite("base_lr", &tmp::OptimConfig::base_lr)
      .def_readwrite("batch_ref", &tmp::OptimConfig::batch_ref)
      .def_readwrite("weight_decay", &tmp::OptimConfig::weight_decay)
      .def_readwrite("momentum", &tmp::OptimConfig::momentum)
      .def_readwrite("total_epochs", &tmp::OptimConfig::total_epochs);

  m.def("cosine_lr", &tmp::cosine_lr);

  py::class_<tmp::TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("epochs", &tmp::TrainConfig::epochs)
      .def_readwrite("label_interval", &tmp::TrainConfig::label_interval)
      .def_readwrite("loss", &tmp::TrainConfig::loss)
      .def_readwrite("sampler", &tmp::TrainConfig::sampler)
      .def_readwrite("views", &tmp::TrainConfig::views)
      .def_readwrite("generator", &tmp::TrainConfig::generator)
      .def_readwrite("cluster", &tmp::TrainConfig::cluster)
      .def_readwrite("pul", &tmp::TrainConfig::pul)
      .def_readwrite("optim", &tmp::TrainConfig::optim)
      .def_readwrite("hidden", &tmp::TrainConfig::hidden)
      .def_readwrite("embed_dim", &tmp::TrainConfig::embed_dim)
      .def_readwrite("seed", &tmp::TrainConfig::seed)
      .def_readwrite("eval_interval", &tmp::TrainConfig::eval_interval)
      .def_readwrite("query_fraction", &tmp::TrainConfig::query_fraction);

  py::class_<tmp::EpochRecord>(m, "EpochRecord")
      .def_readonly("epoch", &tmp::EpochRecord::epoch)
      .def_readonly("mean_loss", &tmp::EpochRecord::mean_loss)
      .def_readonly("lr", &tmp::EpochRecord::lr)
      .def_readonly("num_classes", &tmp::EpochRecord::num_classes)
      .def_readonly("num_singletons", &tmp::EpochRecord::num_singletons)
      .def_readonly("map", &tmp::EpochRecord::map)
      .def_readonly("cmc1", &tmp::EpochRecord::cmc1);

  py::class_<tmp::TrainLog>(m, "TrainLog")
      .def_readonly("epochs", &tmp::TrainLog::epochs);

  py::class_<tmp::EncoderParams>(m, "EncoderParams")
      .def("input_dim", &tmp::EncoderParams::input_dim)
      .def("output_dim", &tmp::EncoderParams::output_dim);

  py::class_<tmp::TrainResult>(m, "TrainResult")
      .def_readonly("params", &tmp::TrainResult::params)
      .def_readonly("log", &tmp::TrainResult::log);

  m.def("run_training", &tmp::run_training);
  m.def("embed_dataset", &tmp::embed_dataset, py::arg("params"),
        py::arg("dataset"), py::arg("batch_size") = 256);
  m.def("save_checkpoint", &tmp::save_checkpoint);
  m.def("load_checkpoint", &tmp::load_checkpoint);
  m.def("write_train_log_csv", &tmp::write_train_log_csv);
  m.def("write_report_csv", &tmp::write_report_csv);
}
