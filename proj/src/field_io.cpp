#include "lsinv/field_io.hpp"

#include <json.hpp>

#include <bit>
#include <charconv>
#include <cstring>
#include <sstream>

#include "lsinv/errors.hpp"

namespace lsinv {

namespace fs = std::filesystem;
using nlohmann::json;

static_assert(std::endian::native == std::endian::little,
              "field files are written as native little-endian float64");

std::size_t FieldHeader::element_count() const {
  std::size_t n = 1;
  for (std::size_t s : shape) n *= s;
  return n;
}

fs::path header_path(const fs::path& bin) {
  fs::path p = bin;
  p += ".json";
  return p;
}

namespace {

json header_json(const FieldHeader& h) {
  return json{{"schema_version", h.schema_version},
              {"manifest_hash", h.manifest_hash},
              {"shape", h.shape},
              {"dtype", "float64"},
              {"byte_order", "little-endian"},
              {"ordering", "row-major, axis 0 outermost; spatial axes x1, x2, x3"},
              {"quantity", h.quantity},
              {"units", h.units}};
}

void write_header(const fs::path& bin, const FieldHeader& h) {
  std::ofstream out(header_path(bin));
  if (!out) throw std::runtime_error("cannot write " + header_path(bin).string());
  out << header_json(h).dump(2) << '\n';
}

}  // namespace

void write_field(const fs::path& bin, const FieldHeader& header,
                 std::span<const double> values) {
  if (values.size() != header.element_count()) {
    throw DimensionError("write_field: " + std::to_string(values.size()) +
                         " values do not match the header shape");
  }
  std::ofstream out(bin, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + bin.string());
  out.write(reinterpret_cast<const char*>(values.data()),
            static_cast<std::streamsize>(values.size_bytes()));
  if (!out) throw std::runtime_error("write failed for " + bin.string());
  write_header(bin, header);
}

std::vector<double> read_field(const fs::path& bin, FieldHeader* header) {
  std::ifstream hin(header_path(bin));
  if (!hin) throw ConfigError("missing field header " + header_path(bin).string());
  json j;
  try {
    hin >> j;
  } catch (const json::exception& e) {
    throw ConfigError("malformed field header " + header_path(bin).string() + ": " +
                      e.what());
  }
  FieldHeader h;
  h.schema_version = j.value("schema_version", 0);
  if (h.schema_version != kSchemaVersion) {
    throw ConfigError("unsupported schema_version in " + header_path(bin).string());
  }
  h.shape = j.at("shape").get<std::vector<std::size_t>>();
  h.quantity = j.value("quantity", "");
  h.units = j.value("units", "");
  h.manifest_hash = j.value("manifest_hash", "");

  std::ifstream in(bin, std::ios::binary | std::ios::ate);
  if (!in) throw ConfigError("missing field file " + bin.string());
  const auto bytes = static_cast<std::size_t>(in.tellg());
  if (bytes != h.element_count() * sizeof(double)) {
    throw ConfigError("field file " + bin.string() + " has " + std::to_string(bytes) +
                      " bytes, header implies " +
                      std::to_string(h.element_count() * sizeof(double)));
  }
  std::vector<double> values(h.element_count());
  in.seekg(0);
  in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(bytes));
  if (header != nullptr) *header = std::move(h);
  return values;
}

FieldStreamWriter::FieldStreamWriter(const fs::path& bin, FieldHeader frame_header)
    : path_(bin), frame_(std::move(frame_header)), out_(bin, std::ios::binary) {
  if (!out_) throw std::runtime_error("cannot write " + bin.string());
}

void FieldStreamWriter::append(std::span<const double> frame) {
  if (frame.size() != frame_.element_count()) {
    throw DimensionError("FieldStreamWriter: frame size mismatch");
  }
  out_.write(reinterpret_cast<const char*>(frame.data()),
             static_cast<std::streamsize>(frame.size_bytes()));
  ++frames_;
}

void FieldStreamWriter::finish() {
  if (finished_) return;
  finished_ = true;
  out_.close();
  FieldHeader h = frame_;
  h.shape.insert(h.shape.begin(), frames_);
  write_header(path_, h);
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string csv_preamble(const std::string& manifest_hash) {
  return "# schema_version=" + std::to_string(kSchemaVersion) +
         " manifest_hash=" + manifest_hash + "\n";
}

void write_data_csv(const fs::path& path, const DataVector& y, const NoiseModel& noise,
                    const std::string& manifest_hash) {
  if (noise.sigma.size() != y.values.size()) {
    throw DimensionError("write_data_csv: data and noise lengths differ");
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << csv_preamble(manifest_hash) << "index,value,sigma\n";
  for (std::size_t j = 0; j < y.values.size(); ++j) {
    out << j << ',' << format_double(y.values[j]) << ',' << format_double(noise.sigma[j])
        << '\n';
  }
}

namespace {

double parse_double(std::string_view s, const fs::path& path, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ConfigError(path.string() + ":" + std::to_string(line) + ": bad number '" +
                      std::string(s) + "'");
  }
  return v;
}

}  // namespace

LoadedData read_data_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("missing data file " + path.string());
  LoadedData data;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != "index,value,sigma") {
        throw ConfigError(path.string() + ": expected header 'index,value,sigma'");
      }
      header_seen = true;
      continue;
    }
    std::vector<std::string_view> cols;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      cols.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (cols.size() != 3) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                        ": expected 3 columns");
    }
    const double index = parse_double(cols[0], path, lineno);
    if (index != static_cast<double>(data.y.values.size())) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                        ": indices must run 0, 1, 2, ...");
    }
    data.y.values.push_back(parse_double(cols[1], path, lineno));
    data.noise.sigma.push_back(parse_double(cols[2], path, lineno));
  }
  if (!header_seen) throw ConfigError(path.string() + ": no header row");
  data.noise.validate();
  return data;
}

}  // namespace lsinv
