#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "tmpcl/rng.hpp"

namespace tmp {

struct OptimConfig {
  double base_lr = 0.1;
  int batch_ref = 256;
  double weight_decay = 1e-4;
  double momentum = 0.9;
  int total_epochs = 100;
};

struct LinearLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;
  Eigen::MatrixXd weight_momentum;
  Eigen::VectorXd bias_momentum;
};

// MLP encoder: hidden layers are affine + ReLU, the output layer is affine.
struct EncoderParams {
  std::vector<LinearLayer> layers;

  int input_dim() const {
    return static_cast<int>(layers.front().weight.cols());
  }
  int output_dim() const {
    return static_cast<int>(layers.back().weight.rows());
  }
};

// widths = {D, hidden..., d}. Weights and biases uniform in
// [-1/sqrt(fan_in), +1/sqrt(fan_in)], momentum buffers zero.
EncoderParams make_mlp(const std::vector<int>& widths, Rng& rng);

struct ForwardCache {
  Eigen::MatrixXd input;                    // B x D
  std::vector<Eigen::MatrixXd> pre_acts;    // per layer, B x width
};

// Rows of `inputs` are samples. Pass a cache to enable backward().
Eigen::MatrixXd forward(const EncoderParams& params,
                        const Eigen::MatrixXd& inputs,
                        ForwardCache* cache = nullptr);

struct ParamGrads {
  std::vector<Eigen::MatrixXd> weight;
  std::vector<Eigen::VectorXd> bias;
};

// Backprop of a scalar loss given dL/d(embeddings).
ParamGrads backward(const EncoderParams& params, const ForwardCache& cache,
                    const Eigen::MatrixXd& grad_wrt_embeddings);

// buffer <- momentum*buffer + grad + weight_decay*param;
// param  <- param - lr*buffer.
void sgd_step(EncoderParams& params, const ParamGrads& grads, double lr,
              const OptimConfig& cfg);

// effective_lr * 0.5 * (1 + cos(pi * epoch / total_epochs)), where
// effective_lr = base_lr * batch_size / batch_ref.
double cosine_lr(int epoch, const OptimConfig& cfg, int batch_size);

// Checkpoint format: magic "TMPW", version u16, layer count u32, then per
// layer out/in dims as u32 followed by row-major f64 weights and biases.
void save_checkpoint(const EncoderParams& params, const std::string& path);
EncoderParams load_checkpoint(const std::string& path);

}  // namespace tmp
