#include "lsinv/manifest.hpp"

#include <openssl/evp.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "lsinv/errors.hpp"

namespace lsinv {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

std::string_view to_string(Experiment e) {
  return e == Experiment::identity ? "identity" : "groundwater";
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"", {"schema_version", "experiment"}},
      {"prior", {"alpha", "dim", "lengths", "boundary", "grid"}},
      {"levelset", {"levels", "phases"}},
      {"truth", {"tau", "seed", "grid", "phase_file", "max_attempts"}},
      {"observations", {"per_axis"}},
      {"noise", {"kind", "level", "seed"}},
      {"darcy", {"epsilon"}},
      {"chain",
       {"beta", "tau_proposal_std", "prior_mean", "prior_std", "tau_min", "tau0",
        "n_steps", "burn_in", "thinning", "seed"}},
      {"output", {"dir", "truth_dir", "data_dir", "snapshot_stride"}},
  };
  return keys;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  const std::string* raw(const std::string& key) const {
    auto it = values_.find(key);
    return it == values_.end() ? nullptr : &it->second;
  }

  void index() {
    for (const auto& [name, node] : tree_) {
      if (node.empty()) {
        check_known("", name);
        values_[name] = trim(node.data());
        continue;
      }
      if (!known_keys().contains(name) || name.empty()) {
        throw ConfigError("manifest: unknown section [" + name + "]");
      }
      for (const auto& [key, leaf] : node) {
        check_known(name, key);
        values_[name + "." + key] = trim(leaf.data());
      }
    }
  }

  double number(const std::string& key, double fallback) const {
    const std::string* s = raw(key);
    if (s == nullptr) return fallback;
    return parse_number(key, *s);
  }

  std::uint64_t count(const std::string& key, std::uint64_t fallback) const {
    const std::string* s = raw(key);
    if (s == nullptr) return fallback;
    std::uint64_t v = 0;
    const auto res = std::from_chars(s->data(), s->data() + s->size(), v);
    if (res.ec != std::errc() || res.ptr != s->data() + s->size()) {
      // accept exponent forms such as 1e5 when they are exact integers
      const double d = parse_number(key, *s);
      if (d < 0 || d != std::floor(d) || d > 9.0e18) {
        throw ConfigError(key + ": expected a non-negative integer, got '" + *s + "'");
      }
      return static_cast<std::uint64_t>(d);
    }
    return v;
  }

  int integer(const std::string& key, int fallback) const {
    const std::string* s = raw(key);
    if (s == nullptr) return fallback;
    int v = 0;
    const auto res = std::from_chars(s->data(), s->data() + s->size(), v);
    if (res.ec != std::errc() || res.ptr != s->data() + s->size()) {
      throw ConfigError(key + ": expected an integer, got '" + *s + "'");
    }
    return v;
  }

  std::string text(const std::string& key, std::string fallback) const {
    const std::string* s = raw(key);
    return s == nullptr ? fallback : *s;
  }

  std::vector<double> list(const std::string& key, std::vector<double> fallback) const {
    const std::string* s = raw(key);
    if (s == nullptr) return fallback;
    std::vector<double> out;
    std::stringstream ss(*s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number(key, trim(item)));
    if (out.empty()) throw ConfigError(key + ": expected a comma separated list");
    return out;
  }

 private:
  static void check_known(const std::string& section, const std::string& key) {
    const auto& keys = known_keys().at(section);
    if (!keys.contains(key)) {
      throw ConfigError("manifest: unknown key '" +
                        (section.empty() ? key : section + "." + key) + "'");
    }
  }

  static double parse_number(const std::string& key, const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
      throw ConfigError(key + ": expected a number, got '" + s + "'");
    }
    return v;
  }

  const pt::ptree& tree_;
  std::map<std::string, std::string> values_;
};

fs::path resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return {};
  fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

void apply_experiment_defaults(RunManifest& m) {
  if (m.experiment == Experiment::identity) {
    m.prior.lengths = {1.0, 1.0};
    m.levelset.phase_values = {1.0, 3.0, 5.0};
    m.chain.hyperprior = {20.0, 10.0};
    m.noise.scheme = {NoiseScheme::Kind::absolute, 0.2};
    m.observations.per_axis = 10;
  } else {
    m.prior.lengths = {6.0, 6.0};
    m.prior.grid = 32;
    m.levelset.phase_values = {std::exp(1.5), std::exp(4.0), std::exp(6.5)};
    m.chain.hyperprior = {35.0, 10.0};
    m.chain.tau0 = 30.0;
    m.noise.scheme = {NoiseScheme::Kind::relative, 0.0175};
    m.observations.per_axis = 8;
  }
}

}  // namespace

RunManifest parse_manifest(std::string_view text, const fs::path& base_dir) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("manifest: ") + e.what());
  }
  Reader r(tree);
  r.index();

  RunManifest m;
  m.hash = sha256_hex(text);
  m.schema_version = r.integer("schema_version", RunManifest::kManifestSchema);
  if (m.schema_version != RunManifest::kManifestSchema) {
    throw ConfigError("schema_version: unsupported manifest schema " +
                      std::to_string(m.schema_version));
  }
  const std::string experiment = r.text("experiment", "identity");
  if (experiment == "identity") {
    m.experiment = Experiment::identity;
  } else if (experiment == "groundwater") {
    m.experiment = Experiment::groundwater;
  } else {
    throw ConfigError("experiment: expected identity or groundwater, got '" +
                      experiment + "'");
  }
  apply_experiment_defaults(m);

  m.prior.alpha = r.number("prior.alpha", m.prior.alpha);
  m.prior.dim = r.integer("prior.dim", m.prior.dim);
  m.prior.lengths = r.list("prior.lengths", m.prior.lengths);
  m.prior.boundary = parse_boundary(r.text("prior.boundary", "neumann-zero-mean"));
  m.prior.grid = r.integer("prior.grid", m.prior.grid);

  m.levelset.base_levels = r.list("levelset.levels", m.levelset.base_levels);
  m.levelset.phase_values = r.list("levelset.phases", m.levelset.phase_values);
  m.levelset.alpha = m.prior.alpha;
  m.levelset.dim = m.prior.dim;

  m.truth.tau = r.number("truth.tau", m.truth.tau);
  m.truth.seed = r.count("truth.seed", m.truth.seed);
  m.truth.grid = r.integer("truth.grid", 2 * m.prior.grid);
  m.truth.phase_file = resolve(base_dir, r.text("truth.phase_file", ""));
  m.truth.max_attempts = r.integer("truth.max_attempts", m.truth.max_attempts);

  m.observations.per_axis = r.integer("observations.per_axis", m.observations.per_axis);

  const std::string kind = r.text(
      "noise.kind", m.noise.scheme.kind == NoiseScheme::Kind::absolute ? "absolute"
                                                                       : "relative");
  if (kind == "absolute") {
    m.noise.scheme.kind = NoiseScheme::Kind::absolute;
  } else if (kind == "relative") {
    m.noise.scheme.kind = NoiseScheme::Kind::relative;
  } else {
    throw ConfigError("noise.kind: expected absolute or relative, got '" + kind + "'");
  }
  m.noise.scheme.level = r.number("noise.level", m.noise.scheme.level);
  m.noise.seed = r.count("noise.seed", m.noise.seed);

  m.darcy.epsilon = r.number("darcy.epsilon", m.darcy.epsilon);

  m.chain.beta = r.number("chain.beta", m.chain.beta);
  m.chain.tau_proposal_std = r.number("chain.tau_proposal_std", m.chain.tau_proposal_std);
  m.chain.hyperprior.mean = r.number("chain.prior_mean", m.chain.hyperprior.mean);
  m.chain.hyperprior.std = r.number("chain.prior_std", m.chain.hyperprior.std);
  m.chain.tau_min = r.number("chain.tau_min", m.chain.tau_min);
  m.chain.tau0 = r.number("chain.tau0", m.chain.tau0);
  m.chain.n_steps = r.count("chain.n_steps", m.chain.n_steps);
  m.chain.burn_in = r.count("chain.burn_in", m.chain.burn_in);
  m.chain.thinning = r.count("chain.thinning", m.chain.thinning);
  m.chain.seed = r.count("chain.seed", m.chain.seed);

  m.output.dir = resolve(base_dir, r.text("output.dir", "run"));
  m.output.truth_dir = resolve(base_dir, r.text("output.truth_dir", ""));
  m.output.data_dir = resolve(base_dir, r.text("output.data_dir", ""));
  m.output.snapshot_stride = r.count("output.snapshot_stride", m.output.snapshot_stride);

  m.validate();
  return m;
}

RunManifest load_manifest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read manifest " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_manifest(ss.str(), path.parent_path());
}

void RunManifest::validate() const {
  prior.validate();
  levelset.validate(experiment == Experiment::groundwater);
  if (levelset.alpha != prior.alpha || levelset.dim != prior.dim) {
    throw ConfigError("levelset: alpha/dim must match the prior");
  }
  if (truth.grid <= prior.grid || (truth.grid & (truth.grid - 1)) != 0) {
    throw ConfigError("truth.grid must be a power of two strictly finer than prior.grid");
  }
  if (!(truth.tau > 0.0)) throw ConfigError("truth.tau must be positive");
  if (truth.max_attempts < 1) throw ConfigError("truth.max_attempts must be >= 1");
  if (observations.per_axis < 1) throw ConfigError("observations.per_axis must be >= 1");
  if (!(noise.scheme.level >= 0.0)) throw ConfigError("noise.level must be >= 0");
  if (!(darcy.epsilon >= 0.0)) throw ConfigError("darcy.epsilon must be >= 0");
  if (output.snapshot_stride < 1) throw ConfigError("output.snapshot_stride must be >= 1");
  chain.validate();
  if (experiment == Experiment::groundwater) {
    if (prior.dim != 2 || prior.lengths[0] != 6.0 || prior.lengths[1] != 6.0) {
      throw ConfigError("prior: the groundwater experiment lives on [0,6]^2 (dim = 2, lengths = 6, 6)");
    }
    if (prior.grid < 4) throw ConfigError("prior.grid: Darcy needs at least 4 cells per axis");
  } else if (!truth.phase_file.empty()) {
    throw ConfigError("truth.phase_file is only supported for the groundwater experiment");
  }
}

PriorSpec RunManifest::truth_prior() const {
  PriorSpec p = prior;
  p.grid = truth.grid;
  return p;
}

fs::path RunManifest::truth_dir() const {
  return output.truth_dir.empty() ? output.dir : output.truth_dir;
}

fs::path RunManifest::data_dir() const {
  return output.data_dir.empty() ? output.dir : output.data_dir;
}

double RunManifest::darcy_epsilon() const {
  return darcy.epsilon > 0.0 ? darcy.epsilon : prior.lengths[0] / prior.grid;
}

ObservationGrid RunManifest::observation_grid() const {
  return uniform_observation_grid(prior.dim, prior.lengths, observations.per_axis);
}

std::unique_ptr<ForwardModel> make_forward_model(const RunManifest& manifest,
                                                 int grid_points) {
  PriorSpec p = manifest.prior;
  p.grid = grid_points;
  const ObservationGrid obs = manifest.observation_grid();
  if (manifest.experiment == Experiment::identity) {
    return std::make_unique<PointObservation>(p.geometry(), obs);
  }
  return std::make_unique<DarcyObservation>(benchmark_darcy_setup(grid_points), obs,
                                            manifest.darcy_epsilon());
}

}  // namespace lsinv
