#pragma once

#include <cstdint>
#include <random>

namespace lsinv {

// Single random stream. One instance per chain / per thread.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  // Uniform on [0, 1).
  double uniform() { return uniform_(engine_); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace lsinv
