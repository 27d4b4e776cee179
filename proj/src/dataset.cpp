#include "tmpcl/dataset.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace tmp {
namespace {

constexpr char kMagic[4] = {'T', 'M', 'P', 'D'};
constexpr std::uint16_t kVersion = 1;

void write_bytes(std::ofstream& out, const void* p, std::size_t n) {
  out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

template <typename T>
void write_le(std::ofstream& out, T value) {
  unsigned char buf[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    buf[i] = static_cast<unsigned char>(
        (static_cast<std::uint64_t>(value) >> (8 * i)) & 0xff);
  }
  write_bytes(out, buf, sizeof(T));
}

void write_le_f32(std::ofstream& out, float value) {
  std::uint32_t bits;
  std::memcpy(&bits, &value, 4);
  write_le(out, bits);
}

template <typename T>
bool read_le(std::ifstream& in, T& value) {
  unsigned char buf[sizeof(T)];
  in.read(reinterpret_cast<char*>(buf), sizeof(T));
  if (in.gcount() != static_cast<std::streamsize>(sizeof(T))) return false;
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  }
  value = static_cast<T>(v);
  return true;
}

bool read_le_f32(std::ifstream& in, float& value) {
  std::uint32_t bits;
  if (!read_le(in, bits)) return false;
  std::memcpy(&value, &bits, 4);
  return true;
}

}  // namespace

Eigen::MatrixXd Dataset::features() const {
  Eigen::MatrixXd m(samples.size(), dim);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::uint32_t j = 0; j < dim; ++j) {
      m(static_cast<Eigen::Index>(i), j) =
          static_cast<double>(samples[i].raw_feature[j]);
    }
  }
  return m;
}

Dataset generate_synthetic(const SynthConfig& config, Rng& rng) {
  if (config.dim < 2) throw std::invalid_argument("synth: dim must be >= 2");
  if (config.num_identities <= 0 || config.samples_per_identity <= 0 ||
      config.num_cameras <= 0) {
    throw std::invalid_argument("synth: counts must be positive");
  }
  if (config.within_identity_noise < 0.0 || config.camera_offset_scale < 0.0) {
    throw std::invalid_argument("synth: noise scales must be non-negative");
  }

  const int d = config.dim;

  // Identity means, uniform on the unit sphere.
  std::vector<Eigen::VectorXd> means(config.num_identities);
  for (auto& m : means) {
    m.resize(d);
    do {
      for (int j = 0; j < d; ++j) m[j] = rng.normal();
    } while (m.norm() == 0.0);
    m.normalize();
  }

  // One fixed offset vector per camera.
  std::vector<Eigen::VectorXd> camera_offsets(config.num_cameras);
  for (auto& off : camera_offsets) {
    off.resize(d);
    for (int j = 0; j < d; ++j) {
      off[j] = rng.normal() * config.camera_offset_scale;
    }
  }

  Dataset ds;
  ds.dim = static_cast<std::uint32_t>(d);
  ds.num_cameras = static_cast<std::uint32_t>(config.num_cameras);
  ds.samples.reserve(static_cast<std::size_t>(config.num_identities) *
                     config.samples_per_identity);
  for (int id = 0; id < config.num_identities; ++id) {
    for (int s = 0; s < config.samples_per_identity; ++s) {
      SampleRecord rec;
      rec.true_identity = id;
      rec.camera_id = static_cast<std::uint32_t>(
          rng.uniform_index(static_cast<std::size_t>(config.num_cameras)));
      rec.raw_feature.resize(static_cast<std::size_t>(d));
      const Eigen::VectorXd& off = camera_offsets[rec.camera_id];
      for (int j = 0; j < d; ++j) {
        double v = means[id][j] + rng.normal() * config.within_identity_noise +
                   off[j];
        rec.raw_feature[static_cast<std::size_t>(j)] = static_cast<float>(v);
      }
      ds.samples.push_back(std::move(rec));
    }
  }
  rng.shuffle(ds.samples);
  return ds;
}

void save_dataset(const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_bytes(out, kMagic, 4);
  write_le(out, kVersion);
  write_le(out, static_cast<std::uint32_t>(ds.samples.size()));
  write_le(out, ds.dim);
  write_le(out, ds.num_cameras);
  for (const auto& rec : ds.samples) {
    write_le(out, rec.camera_id);
    write_le(out, rec.true_identity ? *rec.true_identity
                                    : static_cast<std::int64_t>(-1));
    for (float v : rec.raw_feature) write_le_f32(out, v);
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);

  char magic[4];
  in.read(magic, 4);
  if (in.gcount() != 4 || std::memcmp(magic, kMagic, 4) != 0) {
    throw DatasetFormatError("bad magic bytes in " + path);
  }
  std::uint16_t version;
  std::uint32_t n, dim, num_cameras;
  if (!read_le(in, version) || !read_le(in, n) || !read_le(in, dim) ||
      !read_le(in, num_cameras)) {
    throw DatasetFormatError("malformed header in " + path);
  }
  if (version != kVersion) {
    throw DatasetFormatError("unsupported version " + std::to_string(version));
  }
  if (dim == 0 || num_cameras == 0) {
    throw DatasetDimensionError("header declares zero dim or camera count");
  }

  Dataset ds;
  ds.dim = dim;
  ds.num_cameras = num_cameras;
  ds.samples.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    SampleRecord& rec = ds.samples[i];
    std::int64_t identity;
    if (!read_le(in, rec.camera_id) || !read_le(in, identity)) {
      throw DatasetTruncatedError("file truncated at record " +
                                  std::to_string(i));
    }
    if (identity >= 0) rec.true_identity = identity;
    if (rec.camera_id >= num_cameras) {
      throw DatasetDimensionError("camera_id out of range at record " +
                                  std::to_string(i));
    }
    rec.raw_feature.resize(dim);
    for (std::uint32_t j = 0; j < dim; ++j) {
      if (!read_le_f32(in, rec.raw_feature[j])) {
        throw DatasetTruncatedError("file truncated at record " +
                                    std::to_string(i));
      }
    }
  }
  return ds;
}

}  // namespace tmp
