#include "tmpcl/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tmp {
namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad integer for " + key + ": " + value);
  }
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad number for " + key + ": " + value);
  }
}

std::vector<int> parse_int_list(const std::string& key,
                                const std::string& value) {
  std::vector<int> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_int(key, item));
  }
  if (out.empty()) throw std::invalid_argument("config: empty list for " + key);
  return out;
}

}  // namespace

void RunConfig::apply(const std::string& key, const std::string& value) {
  if (key == "ids") synth.num_identities = parse_int(key, value);
  else if (key == "per_id") synth.samples_per_identity = parse_int(key, value);
  else if (key == "dim") synth.dim = parse_int(key, value);
  else if (key == "cameras") synth.num_cameras = parse_int(key, value);
  else if (key == "noise") synth.within_identity_noise = parse_double(key, value);
  else if (key == "camera_offset") synth.camera_offset_scale = parse_double(key, value);
  else if (key == "epochs") train.epochs = parse_int(key, value);
  else if (key == "label_interval") train.label_interval = parse_int(key, value);
  else if (key == "mode") train.loss.mode = parse_loss_mode(value);
  else if (key == "tau") train.loss.temperature = parse_double(key, value);
  else if (key == "epsilon") train.cluster.epsilon = parse_double(key, value);
  else if (key == "min_samples") train.cluster.min_samples = parse_int(key, value);
  else if (key == "k1") train.cluster.k1 = parse_int(key, value);
  else if (key == "k2") train.cluster.k2 = parse_int(key, value);
  else if (key == "labels") train.generator = parse_label_generator(value);
  else if (key == "kmeans_k") train.pul.k_means_k = parse_int(key, value);
  else if (key == "lambda") train.pul.reliability = parse_double(key, value);
  else if (key == "kmeans_iters") train.pul.max_iters = parse_int(key, value);
  else if (key == "kmeans_restarts") train.pul.restarts = parse_int(key, value);
  else if (key == "batch") train.sampler.batch_size = parse_int(key, value);
  else if (key == "K") train.sampler.k = parse_int(key, value);
  else if (key == "sampler") {
    if (value == "pk") train.sampler.use_pk = true;
    else if (value == "random") train.sampler.use_pk = false;
    else throw std::invalid_argument("config: sampler must be pk or random");
  }
  else if (key == "noise_std") train.views.noise_std = parse_double(key, value);
  else if (key == "mask_prob") train.views.mask_prob = parse_double(key, value);
  else if (key == "scale_jitter") train.views.scale_jitter = parse_double(key, value);
  else if (key == "base_lr") train.optim.base_lr = parse_double(key, value);
  else if (key == "batch_ref") train.optim.batch_ref = parse_int(key, value);
  else if (key == "weight_decay") train.optim.weight_decay = parse_double(key, value);
  else if (key == "momentum") train.optim.momentum = parse_double(key, value);
  else if (key == "hidden") train.hidden = parse_int_list(key, value);
  else if (key == "embed_dim") train.embed_dim = parse_int(key, value);
  else if (key == "seed") train.seed = static_cast<std::uint64_t>(std::stoull(value));
  else if (key == "eval_interval") train.eval_interval = parse_int(key, value);
  else if (key == "query_fraction") train.query_fraction = parse_double(key, value);
  else throw std::invalid_argument("config: unknown key: " + key);
}

std::vector<std::pair<std::string, std::string>> RunConfig::entries() const {
  auto d = [](double v) {
    std::ostringstream ss;
    ss << v;
    return ss.str();
  };
  std::string hidden;
  for (std::size_t i = 0; i < train.hidden.size(); ++i) {
    if (i) hidden += ",";
    hidden += std::to_string(train.hidden[i]);
  }
  return {
      {"ids", std::to_string(synth.num_identities)},
      {"per_id", std::to_string(synth.samples_per_identity)},
      {"dim", std::to_string(synth.dim)},
      {"cameras", std::to_string(synth.num_cameras)},
      {"noise", d(synth.within_identity_noise)},
      {"camera_offset", d(synth.camera_offset_scale)},
      {"epochs", std::to_string(train.epochs)},
      {"label_interval", std::to_string(train.label_interval)},
      {"mode", loss_mode_name(train.loss.mode)},
      {"tau", d(train.loss.temperature)},
      {"epsilon", d(train.cluster.epsilon)},
      {"min_samples", std::to_string(train.cluster.min_samples)},
      {"k1", std::to_string(train.cluster.k1)},
      {"k2", std::to_string(train.cluster.k2)},
      {"labels", train.generator == LabelGenerator::kDbscan ? "dbscan" : "pul"},
      {"kmeans_k", std::to_string(train.pul.k_means_k)},
      {"lambda", d(train.pul.reliability)},
      {"kmeans_iters", std::to_string(train.pul.max_iters)},
      {"kmeans_restarts", std::to_string(train.pul.restarts)},
      {"batch", std::to_string(train.sampler.batch_size)},
      {"K", std::to_string(train.sampler.k)},
      {"sampler", train.sampler.use_pk ? "pk" : "random"},
      {"noise_std", d(train.views.noise_std)},
      {"mask_prob", d(train.views.mask_prob)},
      {"scale_jitter", d(train.views.scale_jitter)},
      {"base_lr", d(train.optim.base_lr)},
      {"batch_ref", std::to_string(train.optim.batch_ref)},
      {"weight_decay", d(train.optim.weight_decay)},
      {"momentum", d(train.optim.momentum)},
      {"hidden", hidden},
      {"embed_dim", std::to_string(train.embed_dim)},
      {"seed", std::to_string(train.seed)},
      {"eval_interval", std::to_string(train.eval_interval)},
      {"query_fraction", d(train.query_fraction)},
  };
}

std::vector<std::pair<std::string, std::string>> parse_config_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: missing '=' at line " +
                                  std::to_string(lineno));
    }
    pairs.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return pairs;
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
  for (const auto& [key, value] : parse_config_file(path)) {
    cfg.apply(key, value);
  }
}

}  // namespace tmp
