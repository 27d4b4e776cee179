#include "tmpcl/encoder.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace tmp {
namespace {

constexpr char kMagic[4] = {'T', 'M', 'P', 'W'};
constexpr std::uint16_t kVersion = 1;

}  // namespace

EncoderParams make_mlp(const std::vector<int>& widths, Rng& rng) {
  if (widths.size() < 2) {
    throw std::invalid_argument("make_mlp: need at least input and output width");
  }
  EncoderParams params;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const int fan_in = widths[l];
    const int fan_out = widths[l + 1];
    if (fan_in <= 0 || fan_out <= 0) {
      throw std::invalid_argument("make_mlp: widths must be positive");
    }
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    LinearLayer layer;
    layer.weight.resize(fan_out, fan_in);
    layer.bias.resize(fan_out);
    for (int i = 0; i < fan_out; ++i) {
      for (int j = 0; j < fan_in; ++j) {
        layer.weight(i, j) = rng.uniform(-bound, bound);
      }
      layer.bias[i] = rng.uniform(-bound, bound);
    }
    layer.weight_momentum = Eigen::MatrixXd::Zero(fan_out, fan_in);
    layer.bias_momentum = Eigen::VectorXd::Zero(fan_out);
    params.layers.push_back(std::move(layer));
  }
  return params;
}

Eigen::MatrixXd forward(const EncoderParams& params,
                        const Eigen::MatrixXd& inputs, ForwardCache* cache) {
  if (inputs.cols() != params.input_dim()) {
    throw std::invalid_argument("forward: input width mismatch");
  }
  if (cache) {
    cache->input = inputs;
    cache->pre_acts.clear();
    cache->pre_acts.reserve(params.layers.size());
  }
  Eigen::MatrixXd h = inputs;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const LinearLayer& layer = params.layers[l];
    Eigen::MatrixXd pre =
        (h * layer.weight.transpose()).rowwise() + layer.bias.transpose();
    if (cache) cache->pre_acts.push_back(pre);
    if (l + 1 < params.layers.size()) {
      h = pre.cwiseMax(0.0);
    } else {
      h = std::move(pre);
    }
  }
  return h;
}

ParamGrads backward(const EncoderParams& params, const ForwardCache& cache,
                    const Eigen::MatrixXd& grad_wrt_embeddings) {
  const std::size_t num_layers = params.layers.size();
  if (cache.pre_acts.size() != num_layers) {
    throw std::invalid_argument("backward: cache does not match params");
  }
  if (grad_wrt_embeddings.rows() != cache.input.rows() ||
      grad_wrt_embeddings.cols() != params.output_dim()) {
    throw std::invalid_argument("backward: upstream gradient shape mismatch");
  }

  ParamGrads grads;
  grads.weight.resize(num_layers);
  grads.bias.resize(num_layers);

  Eigen::MatrixXd g = grad_wrt_embeddings;  // dL/d(pre_act of last layer)
  for (std::size_t l = num_layers; l-- > 0;) {
    // Input of layer l = ReLU(pre_act[l-1]) for l > 0, else the raw input.
    Eigen::MatrixXd layer_in =
        l == 0 ? cache.input
               : Eigen::MatrixXd(cache.pre_acts[l - 1].cwiseMax(0.0));
    grads.weight[l] = g.transpose() * layer_in;
    grads.bias[l] = g.colwise().sum().transpose();
    if (l > 0) {
      g = (g * params.layers[l].weight).array() *
          (cache.pre_acts[l - 1].array() > 0.0).cast<double>();
    }
  }
  return grads;
}

void sgd_step(EncoderParams& params, const ParamGrads& grads, double lr,
              const OptimConfig& cfg) {
  if (grads.weight.size() != params.layers.size()) {
    throw std::invalid_argument("sgd_step: gradient count mismatch");
  }
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    if (!grads.weight[l].allFinite() || !grads.bias[l].allFinite()) {
      throw std::invalid_argument("sgd_step: non-finite gradient entries");
    }
    LinearLayer& layer = params.layers[l];
    if (grads.weight[l].rows() != layer.weight.rows() ||
        grads.weight[l].cols() != layer.weight.cols() ||
        grads.bias[l].size() != layer.bias.size()) {
      throw std::invalid_argument("sgd_step: gradient shape mismatch");
    }
    layer.weight_momentum = cfg.momentum * layer.weight_momentum +
                            grads.weight[l] + cfg.weight_decay * layer.weight;
    layer.bias_momentum = cfg.momentum * layer.bias_momentum + grads.bias[l] +
                          cfg.weight_decay * layer.bias;
    layer.weight -= lr * layer.weight_momentum;
    layer.bias -= lr * layer.bias_momentum;
  }
}

double cosine_lr(int epoch, const OptimConfig& cfg, int batch_size) {
  if (epoch < 0 || epoch > cfg.total_epochs) {
    throw std::invalid_argument("cosine_lr: epoch out of range");
  }
  const double effective_lr =
      cfg.base_lr * static_cast<double>(batch_size) / cfg.batch_ref;
  const double t = static_cast<double>(epoch) / cfg.total_epochs;
  return effective_lr * 0.5 * (1.0 + std::cos(M_PI * t));
}

void save_checkpoint(const EncoderParams& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(kMagic, 4);
  auto write_u = [&out](std::uint32_t v) {
    char buf[4];
    for (int i = 0; i < 4; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(buf, 4);
  };
  char vbuf[2] = {static_cast<char>(kVersion & 0xff),
                  static_cast<char>(kVersion >> 8)};
  out.write(vbuf, 2);
  write_u(static_cast<std::uint32_t>(params.layers.size()));
  for (const auto& layer : params.layers) {
    write_u(static_cast<std::uint32_t>(layer.weight.rows()));
    write_u(static_cast<std::uint32_t>(layer.weight.cols()));
    for (Eigen::Index i = 0; i < layer.weight.rows(); ++i) {
      for (Eigen::Index j = 0; j < layer.weight.cols(); ++j) {
        double v = layer.weight(i, j);
        out.write(reinterpret_cast<const char*>(&v), 8);
      }
    }
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) {
      double v = layer.bias[i];
      out.write(reinterpret_cast<const char*>(&v), 8);
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

EncoderParams load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  char magic[4];
  in.read(magic, 4);
  if (in.gcount() != 4 || std::memcmp(magic, kMagic, 4) != 0) {
    throw std::runtime_error("bad checkpoint magic in " + path);
  }
  auto read_u = [&in]() {
    unsigned char buf[4];
    in.read(reinterpret_cast<char*>(buf), 4);
    if (in.gcount() != 4) throw std::runtime_error("truncated checkpoint");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf[i]) << (8 * i);
    return v;
  };
  unsigned char vbuf[2];
  in.read(reinterpret_cast<char*>(vbuf), 2);
  if (in.gcount() != 2) throw std::runtime_error("truncated checkpoint");
  const std::uint16_t version =
      static_cast<std::uint16_t>(vbuf[0] | (vbuf[1] << 8));
  if (version != kVersion) {
    throw std::runtime_error("unsupported checkpoint version");
  }
  const std::uint32_t num_layers = read_u();
  EncoderParams params;
  for (std::uint32_t l = 0; l < num_layers; ++l) {
    const std::uint32_t rows = read_u();
    const std::uint32_t cols = read_u();
    LinearLayer layer;
    layer.weight.resize(rows, cols);
    layer.bias.resize(rows);
    auto read_f64 = [&in]() {
      double v;
      in.read(reinterpret_cast<char*>(&v), 8);
      if (in.gcount() != 8) throw std::runtime_error("truncated checkpoint");
      return v;
    };
    for (std::uint32_t i = 0; i < rows; ++i) {
      for (std::uint32_t j = 0; j < cols; ++j) layer.weight(i, j) = read_f64();
    }
    for (std::uint32_t i = 0; i < rows; ++i) layer.bias[i] = read_f64();
    layer.weight_momentum = Eigen::MatrixXd::Zero(rows, cols);
    layer.bias_momentum = Eigen::VectorXd::Zero(rows);
    params.layers.push_back(std::move(layer));
  }
  return params;
}

}  // namespace tmp
