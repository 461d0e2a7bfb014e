#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>

#include "lsinv/forward_models.hpp"
#include "lsinv/levelset_map.hpp"
#include "lsinv/posterior.hpp"
#include "lsinv/sampler.hpp"
#include "lsinv/spectral_prior.hpp"

namespace lsinv {

enum class Experiment { identity, groundwater };

struct TruthConfig {
  double tau = 15.0;
  std::uint64_t seed = 1;
  int grid = 0;  // points per axis; 0 means twice the inversion grid
  std::filesystem::path phase_file;  // external truth (groundwater only)
  int max_attempts = 20;             // redraws until every phase is present
};

struct ObservationConfig {
  int per_axis = 10;
};

struct NoiseConfig {
  NoiseScheme scheme;
  std::uint64_t seed = 2;
};

struct DarcyConfig {
  double epsilon = 0.0;  // 0 means one inversion cell width
};

struct OutputConfig {
  std::filesystem::path dir = "run";
  std::filesystem::path truth_dir;  // empty means dir
  std::filesystem::path data_dir;   // empty means dir
  std::uint64_t snapshot_stride = 100;  // every k-th retained sample
};

/// Everything needed to reproduce one experiment.
///
/// Text format: "key = value" lines, optionally grouped under [section]
/// headers; '#' or ';' start comments. Lists are comma separated.
struct RunManifest {
  int schema_version = kManifestSchema;
  Experiment experiment = Experiment::identity;
  PriorSpec prior;
  LevelSetSpec levelset;
  TruthConfig truth;
  ObservationConfig observations;
  NoiseConfig noise;
  DarcyConfig darcy;
  ChainConfig chain;
  OutputConfig output;
  std::string hash;  // SHA-256 of the manifest text

  static constexpr int kManifestSchema = 1;

  /// Cross-field checks; throws ConfigError naming the offending key.
  void validate() const;

  PriorSpec truth_prior() const;
  std::filesystem::path truth_dir() const;
  std::filesystem::path data_dir() const;
  double darcy_epsilon() const;
  ObservationGrid observation_grid() const;
};

std::string_view to_string(Experiment e);

/// Parses manifest text. Relative paths are resolved against base_dir.
RunManifest parse_manifest(std::string_view text,
                           const std::filesystem::path& base_dir = {});
RunManifest load_manifest(const std::filesystem::path& path);

std::string sha256_hex(std::string_view data);

/// Forward model G's observation operator on a grid of the given size.
std::unique_ptr<ForwardModel> make_forward_model(const RunManifest& manifest,
                                                 int grid_points);

}  // namespace lsinv
