#include "lsinv/commands.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <optional>

#include "lsinv/errors.hpp"
#include "lsinv/field_io.hpp"
#include "lsinv/sampler.hpp"

namespace lsinv {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<std::size_t> grid_shape(const PriorSpec& prior) {
  return std::vector<std::size_t>(prior.dim, static_cast<std::size_t>(prior.grid));
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create directory " + dir.string() + ": " + ec.message());
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("missing file " + path.string());
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    throw ConfigError("malformed " + path.string() + ": " + e.what());
  }
}

json prior_json(const PriorSpec& p) {
  return {{"alpha", p.alpha},
          {"dim", p.dim},
          {"lengths", std::vector<double>(p.lengths.begin(), p.lengths.begin() + p.dim)},
          {"boundary", std::string(to_string(p.boundary))},
          {"grid", p.grid}};
}

PriorSpec prior_from_json(const json& j) {
  PriorSpec p;
  p.alpha = j.at("alpha").get<double>();
  p.dim = j.at("dim").get<int>();
  p.lengths = j.at("lengths").get<std::vector<double>>();
  p.boundary = parse_boundary(j.at("boundary").get<std::string>());
  p.grid = j.at("grid").get<int>();
  p.validate();
  return p;
}

json levelset_json(const LevelSetSpec& l) {
  return {{"levels", l.base_levels}, {"phases", l.phase_values}};
}

LevelSetSpec levelset_from_json(const json& j, const PriorSpec& p) {
  LevelSetSpec l;
  l.base_levels = j.at("levels").get<std::vector<double>>();
  l.phase_values = j.at("phases").get<std::vector<double>>();
  l.alpha = p.alpha;
  l.dim = p.dim;
  l.validate();
  return l;
}

/// Index of the phase value closest to each entry.
PhaseField phases_from_values(std::vector<double> values, const LevelSetSpec& levelset) {
  PhaseField f;
  f.index.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < levelset.phases(); ++k) {
      if (std::abs(values[i] - levelset.phase_values[k]) <
          std::abs(values[i] - levelset.phase_values[best])) {
        best = k;
      }
    }
    f.index[i] = static_cast<std::uint8_t>(best);
  }
  f.values = std::move(values);
  return f;
}

FieldHeader header(std::vector<std::size_t> shape, std::string quantity, std::string units,
                   const std::string& hash) {
  FieldHeader h;
  h.shape = std::move(shape);
  h.quantity = std::move(quantity);
  h.units = std::move(units);
  h.manifest_hash = hash;
  return h;
}

// ---- stats persistence -------------------------------------------------

json welford_json(const Welford& w) {
  return {{"n", w.count()}, {"mean", w.mean()}, {"m2", w.m2()}};
}

json welford_json(const VectorWelford& w) {
  return {{"n", w.count()}, {"mean", w.mean()}, {"m2", w.m2()}};
}

Welford scalar_from_json(const json& j) {
  return Welford::from_moments(j.at("n").get<std::uint64_t>(), j.at("mean").get<double>(),
                               j.at("m2").get<double>());
}

VectorWelford vector_from_json(const json& j) {
  return VectorWelford::from_moments(j.at("n").get<std::uint64_t>(),
                                     j.at("mean").get<std::vector<double>>(),
                                     j.at("m2").get<std::vector<double>>());
}

json stats_json(const RunningStats& s) {
  return {{"steps", s.steps},
          {"accepted_u", s.accepted_u},
          {"accepted_tau", s.accepted_tau},
          {"coeffs", welford_json(s.coeffs)},
          {"phase", welford_json(s.phase)},
          {"rescaled", welford_json(s.rescaled)},
          {"tau", welford_json(s.tau)},
          {"phi", welford_json(s.phi)},
          {"tau_trace", s.tau_trace},
          {"phi_trace", s.phi_trace},
          {"leading_modes", s.leading_modes}};
}

RunningStats stats_from_json(const json& j) {
  RunningStats s;
  s.steps = j.at("steps").get<std::uint64_t>();
  s.accepted_u = j.at("accepted_u").get<std::uint64_t>();
  s.accepted_tau = j.at("accepted_tau").get<std::uint64_t>();
  s.coeffs = vector_from_json(j.at("coeffs"));
  s.phase = vector_from_json(j.at("phase"));
  s.rescaled = vector_from_json(j.at("rescaled"));
  s.tau = scalar_from_json(j.at("tau"));
  s.phi = scalar_from_json(j.at("phi"));
  s.tau_trace = j.at("tau_trace").get<std::vector<double>>();
  s.phi_trace = j.at("phi_trace").get<std::vector<double>>();
  s.leading_modes = j.at("leading_modes").get<std::vector<double>>();
  if (s.tau_trace.size() != s.retained() || s.phi_trace.size() != s.retained() ||
      s.leading_modes.size() != kLeadingModes * s.retained()) {
    throw DimensionError("stats: trace lengths disagree with the retained count");
  }
  return s;
}

void write_samples_csv(const fs::path& path, const RunningStats& s, const std::string& hash) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << csv_preamble(hash) << "sample,tau,phi";
  for (std::size_t k = 1; k <= kLeadingModes; ++k) out << ",kl" << k;
  out << '\n';
  for (std::size_t i = 0; i < s.tau_trace.size(); ++i) {
    out << i << ',' << format_double(s.tau_trace[i]) << ',' << format_double(s.phi_trace[i]);
    for (std::size_t k = 0; k < kLeadingModes; ++k) {
      out << ',' << format_double(s.leading_modes[i * kLeadingModes + k]);
    }
    out << '\n';
  }
}

void write_summary(const fs::path& dir, const StatsSummary& s, const PriorSpec& prior,
                   const std::string& hash) {
  json fields = json::object();
  if (s.retained > 0) {
    const auto shape = grid_shape(prior);
    const std::array<std::pair<const char*, const std::vector<double>*>, 4> grids{{
        {"mean_phase", &s.mean_phase},
        {"var_phase", &s.var_phase},
        {"pushforward_of_mean", &s.pushforward_of_mean},
        {"mean_rescaled", &s.mean_rescaled},
    }};
    for (const auto& [name, values] : grids) {
      const std::string file = std::string(name) + ".bin";
      write_field(dir / file, header(shape, name, "", hash), *values);
      fields[name] = file;
    }
  }
  std::vector<double> leading(s.mean_coeffs.begin(),
                              s.mean_coeffs.begin() +
                                  std::min(kLeadingModes, s.mean_coeffs.size()));
  write_json(dir / "summary.json",
             {{"schema_version", kSchemaVersion},
              {"manifest_hash", hash},
              {"steps", s.steps},
              {"retained", s.retained},
              {"zero_retained", s.retained == 0},
              {"acceptance_u", s.acceptance_u},
              {"acceptance_tau", s.acceptance_tau},
              {"tau_mean", s.tau_mean},
              {"tau_std", s.tau_std},
              {"phi_mean", s.phi_mean},
              {"mean_leading_coeffs", leading},
              {"fields", fields}});
}

// ---- sample observer ---------------------------------------------------

class RunWriter final : public ChainObserver {
 public:
  RunWriter(const fs::path& dir, const RunManifest& m)
      : trace_(dir / "trace.csv"),
        stride_(m.output.snapshot_stride),
        phase_(dir / "snapshots_phase.bin",
               header(grid_shape(m.prior), "phase", "", m.hash)),
        levelset_(dir / "snapshots_levelset.bin",
                  header(grid_shape(m.prior), "levelset", "", m.hash)) {
    if (!trace_) throw std::runtime_error("cannot write trace.csv in " + dir.string());
    trace_ << csv_preamble(m.hash) << "step,tau,phi,accept_u,accept_tau\n";
  }

  void on_step(const StepRecord& r) override {
    line_.clear();
    line_ += std::to_string(r.step);
    line_ += ',';
    line_ += format_double(r.tau);
    line_ += ',';
    line_ += format_double(r.phi);
    line_ += r.accept_u ? ",1" : ",0";
    line_ += r.accept_tau ? ",1\n" : ",0\n";
    trace_ << line_;
  }

  void on_sample(std::uint64_t, const ChainState& state, std::span<const double>) override {
    if (retained_++ % stride_ != 0) return;
    phase_.append(state.phases.values);
    levelset_.append(state.grid);
  }

  void finish() {
    trace_.close();
    if (!trace_) throw std::runtime_error("trace.csv write failed");
    phase_.finish();
    levelset_.finish();
  }

 private:
  std::ofstream trace_;
  std::uint64_t stride_;
  std::uint64_t retained_ = 0;
  FieldStreamWriter phase_;
  FieldStreamWriter levelset_;
  std::string line_;
};

}  // namespace

// ---- commands ----------------------------------------------------------

TruthOutcome cmd_make_truth(const RunManifest& m) {
  const fs::path dir = m.truth_dir();
  ensure_dir(dir);
  const PriorSpec truth_prior = m.truth_prior();
  const auto shape = grid_shape(truth_prior);
  TruthOutcome outcome;
  json meta = {{"schema_version", kSchemaVersion},
               {"manifest_hash", m.hash},
               {"experiment", std::string(to_string(m.experiment))},
               {"grid", m.truth.grid},
               {"seed", m.truth.seed}};

  if (!m.truth.phase_file.empty()) {
    FieldHeader h;
    std::vector<double> values = read_field(m.truth.phase_file, &h);
    if (h.shape != shape) {
      throw ConfigError("truth.phase_file: shape does not match truth.grid = " +
                        std::to_string(m.truth.grid));
    }
    for (double v : values) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw ConfigError("truth.phase_file: permeabilities must be positive and finite");
      }
    }
    const PhaseField phases = phases_from_values(std::move(values), m.levelset);
    write_field(dir / "truth_phase.bin", header(shape, "phase", "", m.hash), phases.values);
    outcome.attempts = 0;
    outcome.phase_fractions = phase_fractions(phases, m.levelset.phases());
    meta["source"] = "file";
    meta["phase_file"] = m.truth.phase_file.string();
  } else {
    const SpectralBasis basis(truth_prior);
    Rng rng(m.truth.seed);
    for (int attempt = 1; attempt <= m.truth.max_attempts; ++attempt) {
      SpectralField u = sample_prior(basis, m.truth.tau, rng);
      std::vector<double> grid = basis.synthesize(u);
      PhaseField phases = apply(grid, m.truth.tau, m.levelset);
      outcome.attempts = static_cast<std::uint64_t>(attempt);
      outcome.phase_fractions = phase_fractions(phases, m.levelset.phases());
      const bool all_present =
          std::all_of(outcome.phase_fractions.begin(), outcome.phase_fractions.end(),
                      [](double f) { return f > 0.0; });
      if (!all_present) continue;
      write_field(dir / "truth_coeffs.bin",
                  header({u.coeffs.size()}, "kl_coefficients", "", m.hash), u.coeffs);
      write_field(dir / "truth_levelset.bin", header(shape, "levelset", "", m.hash), grid);
      write_field(dir / "truth_phase.bin", header(shape, "phase", "", m.hash),
                  phases.values);
      break;
    }
    if (std::any_of(outcome.phase_fractions.begin(), outcome.phase_fractions.end(),
                    [](double f) { return f == 0.0; })) {
      throw NumericalError("make-truth: no draw in " + std::to_string(m.truth.max_attempts) +
                           " attempts contains every phase");
    }
    meta["source"] = "prior";
    meta["tau"] = m.truth.tau;
    meta["attempts"] = outcome.attempts;
    meta["modes"] = basis.size();
  }
  meta["phase_fractions"] = outcome.phase_fractions;
  write_json(dir / "truth.json", meta);
  return outcome;
}

DataOutcome cmd_make_data(const RunManifest& m) {
  const fs::path truth_dir = m.truth_dir();
  const json truth = read_json(truth_dir / "truth.json");
  if (truth.value("grid", 0) != m.truth.grid) {
    throw ConfigError("truth.grid: stored truth was generated on a different grid");
  }
  FieldHeader h;
  std::vector<double> values = read_field(truth_dir / "truth_phase.bin", &h);
  if (h.shape != grid_shape(m.truth_prior())) {
    throw ConfigError("truth_phase.bin: shape does not match truth.grid");
  }
  const PhaseField phases = phases_from_values(std::move(values), m.levelset);

  std::unique_ptr<ForwardModel> forward = make_forward_model(m, m.truth.grid);
  Rng rng(m.noise.seed);
  SyntheticData data = generate_data(phases, *forward, m.noise.scheme, rng);
  data.y.provenance = {truth.value("seed", std::uint64_t{0}), m.noise.seed,
                       truth.value("tau", 0.0), m.truth.grid, m.prior.grid};

  const fs::path dir = m.data_dir();
  ensure_dir(dir);
  write_data_csv(dir / "data.csv", data.y, data.noise, m.hash);

  DataOutcome outcome;
  outcome.observations = data.y.values.size();
  outcome.mean_relative_error = mean_relative_error(data.y.values, data.noise_free);
  write_json(dir / "data.json",
             {{"schema_version", kSchemaVersion},
              {"manifest_hash", m.hash},
              {"experiment", std::string(to_string(m.experiment))},
              {"observations", outcome.observations},
              {"truth_seed", data.y.provenance.truth_seed},
              {"truth_tau", data.y.provenance.truth_tau},
              {"truth_grid", data.y.provenance.truth_grid},
              {"inversion_grid", data.y.provenance.inversion_grid},
              {"noise_seed", m.noise.seed},
              {"noise_kind",
               m.noise.scheme.kind == NoiseScheme::Kind::absolute ? "absolute" : "relative"},
              {"noise_level", m.noise.scheme.level},
              {"mean_relative_error", outcome.mean_relative_error},
              {"noise_free", data.noise_free}});
  return outcome;
}

StatsSummary cmd_sample(const RunManifest& m) {
  LoadedData data = read_data_csv(m.data_dir() / "data.csv");
  auto basis = std::make_shared<const SpectralBasis>(m.prior);
  std::unique_ptr<ForwardModel> forward = make_forward_model(m, m.prior.grid);
  if (forward->output_size() != data.y.values.size()) {
    throw ConfigError("data.csv has " + std::to_string(data.y.values.size()) +
                      " observations, the manifest implies " +
                      std::to_string(forward->output_size()));
  }
  Posterior posterior(basis, m.levelset, std::move(forward), std::move(data.y),
                      std::move(data.noise));

  const fs::path dir = m.output.dir;
  ensure_dir(dir);
  RunWriter writer(dir, m);
  GibbsSampler::Result result = gibbs_run(posterior, m.chain, &writer);
  writer.finish();

  write_samples_csv(dir / "samples.csv", result.stats, m.hash);
  json stats = stats_json(result.stats);
  stats["schema_version"] = kSchemaVersion;
  stats["manifest_hash"] = m.hash;
  stats["prior"] = prior_json(m.prior);
  stats["levelset"] = levelset_json(m.levelset);
  stats["chain_seed"] = m.chain.seed;
  write_json(dir / "stats.json", stats);

  StatsSummary summary = stats_finalize(result.stats, *basis, m.levelset);
  write_summary(dir, summary, m.prior, m.hash);
  return summary;
}

Histogram histogram(std::span<const double> xs, int bins) {
  Histogram h;
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  if (xs.empty()) return h;
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  h.lo = *lo;
  h.hi = *hi;
  if (h.lo == h.hi) {
    h.lo -= 0.5;
    h.hi += 0.5;
  }
  const double width = (h.hi - h.lo) / bins;
  for (double x : xs) {
    auto b = static_cast<std::ptrdiff_t>((x - h.lo) / width);
    b = std::clamp<std::ptrdiff_t>(b, 0, bins - 1);
    ++h.counts[static_cast<std::size_t>(b)];
  }
  return h;
}

Histogram2d histogram2d(std::span<const double> xs, std::span<const double> ys, int bins) {
  if (xs.size() != ys.size()) throw DimensionError("histogram2d: length mismatch");
  Histogram2d h;
  h.x = histogram(xs, bins);
  h.y = histogram(ys, bins);
  h.counts.assign(static_cast<std::size_t>(bins) * bins, 0);
  if (xs.empty()) return h;
  const double wx = (h.x.hi - h.x.lo) / bins;
  const double wy = (h.y.hi - h.y.lo) / bins;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto bx = std::clamp<std::ptrdiff_t>(
        static_cast<std::ptrdiff_t>((xs[i] - h.x.lo) / wx), 0, bins - 1);
    const auto by = std::clamp<std::ptrdiff_t>(
        static_cast<std::ptrdiff_t>((ys[i] - h.y.lo) / wy), 0, bins - 1);
    ++h.counts[static_cast<std::size_t>(bx * bins + by)];
  }
  return h;
}

namespace {

void write_histogram(const fs::path& path, const Histogram& h, const std::string& hash) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << csv_preamble(hash) << "bin_lo,bin_hi,count\n";
  const double w = (h.hi - h.lo) / h.counts.size();
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    out << format_double(h.lo + b * w) << ',' << format_double(h.lo + (b + 1) * w) << ','
        << h.counts[b] << '\n';
  }
}

void write_histogram2d(const fs::path& path, const Histogram2d& h, const std::string& hash) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << csv_preamble(hash) << "x_lo,x_hi,y_lo,y_hi,count\n";
  const std::size_t n = h.x.counts.size();
  const double wx = (h.x.hi - h.x.lo) / n;
  const double wy = (h.y.hi - h.y.lo) / n;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out << format_double(h.x.lo + i * wx) << ',' << format_double(h.x.lo + (i + 1) * wx)
          << ',' << format_double(h.y.lo + j * wy) << ','
          << format_double(h.y.lo + (j + 1) * wy) << ',' << h.counts[i * n + j] << '\n';
    }
  }
}

}  // namespace

StatsSummary cmd_summarize(const std::vector<fs::path>& runs, const fs::path& out) {
  if (runs.empty()) throw ConfigError("summarize: no run directories given");
  std::optional<json> prior_ref;
  json levelset_ref;
  RunningStats merged;
  std::string hashes;
  std::string first_hash;
  for (const fs::path& run : runs) {
    const fs::path file = fs::is_directory(run) ? run / "stats.json" : run;
    const json j = read_json(file);
    if (j.value("schema_version", 0) != kSchemaVersion) {
      throw ConfigError(file.string() + ": unsupported schema_version");
    }
    if (!prior_ref) {
      prior_ref = j.at("prior");
      levelset_ref = j.at("levelset");
      first_hash = j.value("manifest_hash", "");
    } else if (j.at("prior") != *prior_ref || j.at("levelset") != levelset_ref) {
      throw DimensionError("summarize: " + file.string() +
                           " was sampled with a different prior or level set");
    }
    RunningStats s = stats_from_json(j);
    merged = hashes.empty() ? std::move(s) : stats_merge(merged, s);
    hashes += j.value("manifest_hash", "") + "\n";
  }
  const std::string hash = runs.size() == 1 ? first_hash : sha256_hex(hashes);

  const PriorSpec prior = prior_from_json(*prior_ref);
  const LevelSetSpec levelset = levelset_from_json(levelset_ref, prior);
  const SpectralBasis basis(prior);

  ensure_dir(out);
  json stats = stats_json(merged);
  stats["schema_version"] = kSchemaVersion;
  stats["manifest_hash"] = hash;
  stats["prior"] = *prior_ref;
  stats["levelset"] = levelset_ref;
  stats["merged_from"] = runs.size();
  write_json(out / "stats.json", stats);

  StatsSummary summary = stats_finalize(merged, basis, levelset);
  write_summary(out, summary, prior, hash);

  std::vector<std::vector<double>> columns;
  std::vector<std::string> names{"tau"};
  columns.push_back(merged.tau_trace);
  for (std::size_t k = 0; k < kLeadingModes; ++k) {
    std::vector<double> col(merged.retained());
    for (std::size_t i = 0; i < col.size(); ++i) col[i] = merged.leading_modes[i * kLeadingModes + k];
    columns.push_back(std::move(col));
    names.push_back("kl" + std::to_string(k + 1));
  }
  for (std::size_t a = 0; a < columns.size(); ++a) {
    write_histogram(out / ("hist_" + names[a] + ".csv"), histogram(columns[a]), hash);
    for (std::size_t b = a + 1; b < columns.size(); ++b) {
      write_histogram2d(out / ("hist2d_" + names[a] + "_" + names[b] + ".csv"),
                        histogram2d(columns[a], columns[b]), hash);
    }
  }
  return summary;
}

}  // namespace lsinv
