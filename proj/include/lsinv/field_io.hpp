#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "lsinv/posterior.hpp"

namespace lsinv {

inline constexpr int kSchemaVersion = 1;

/// Sidecar description of a binary field file. Binary payload is raw
/// little-endian float64 in row-major order (axis 0 outermost); the header
/// lives next to it as <file>.json.
struct FieldHeader {
  std::vector<std::size_t> shape;
  std::string quantity;
  std::string units;
  std::string manifest_hash;
  int schema_version = kSchemaVersion;

  std::size_t element_count() const;
};

std::filesystem::path header_path(const std::filesystem::path& bin);

/// Writes bin and bin.json. Throws std::runtime_error on I/O failure and
/// DimensionError when values.size() disagrees with the shape.
void write_field(const std::filesystem::path& bin, const FieldHeader& header,
                 std::span<const double> values);

/// Reads bin, validated against bin.json. Throws ConfigError when the files
/// are missing, the schema is unknown or the payload size is wrong.
std::vector<double> read_field(const std::filesystem::path& bin,
                               FieldHeader* header = nullptr);

/// Appends fixed-size frames to a binary file; finish() writes the header
/// with a leading frame-count axis.
class FieldStreamWriter {
 public:
  FieldStreamWriter(const std::filesystem::path& bin, FieldHeader frame_header);
  void append(std::span<const double> frame);
  std::size_t frames() const { return frames_; }
  void finish();

 private:
  std::filesystem::path path_;
  FieldHeader frame_;
  std::ofstream out_;
  std::size_t frames_ = 0;
  bool finished_ = false;
};

/// Shortest round-trip decimal form of x.
std::string format_double(double x);

/// "# schema_version=1 manifest_hash=<hash>" comment line for CSV outputs.
std::string csv_preamble(const std::string& manifest_hash);

void write_data_csv(const std::filesystem::path& path, const DataVector& y,
                    const NoiseModel& noise, const std::string& manifest_hash);

struct LoadedData {
  DataVector y;
  NoiseModel noise;
};

/// Reads index,value,sigma rows (comment lines starting with '#' skipped).
LoadedData read_data_csv(const std::filesystem::path& path);

}  // namespace lsinv
