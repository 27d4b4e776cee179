#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tmpcl/rng.hpp"

namespace tmp {

// One feature vector with optional ground-truth identity and a camera id.
// Identities are only ever consulted by evaluation code; the training path
// never reads them.
struct SampleRecord {
  std::vector<float> raw_feature;
  std::optional<std::int64_t> true_identity;
  std::uint32_t camera_id = 0;
};

struct Dataset {
  std::vector<SampleRecord> samples;
  std::uint32_t dim = 0;
  std::uint32_t num_cameras = 1;

  std::size_t size() const { return samples.size(); }

  // Raw features as an n x D double matrix (training math is f64).
  Eigen::MatrixXd features() const;
};

struct SynthConfig {
  int num_identities = 50;
  int samples_per_identity = 20;
  int dim = 64;
  int num_cameras = 6;
  double within_identity_noise = 0.1;
  double camera_offset_scale = 0.1;
};

// Synthetic identity-cluster data: each identity gets a mean on the unit
// sphere, each sample adds gaussian noise plus a fixed per-camera offset
// vector. Pure function of (config, rng seed).
Dataset generate_synthetic(const SynthConfig& config, Rng& rng);

// Dataset file errors, reported distinctly.
struct DatasetFormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DatasetDimensionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DatasetTruncatedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Binary layout: magic "TMPD", version u16, then n, D, num_cameras as
// little-endian u32, then per sample: camera_id u32, identity i64
// (-1 = absent), D little-endian f32 values.
void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);

}  // namespace tmp
