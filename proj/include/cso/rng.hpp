#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace cso {

// Per-stream random source. Each dataset, replication or oracle run owns one,
// so results never depend on scheduling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double gaussian() { return normal_(engine_); }
  // Uniform on [0, 1).
  double uniform() { return uniform_(engine_); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t z);

// 64-bit FNV-1a.
std::uint64_t hash_string(std::string_view s);

// seed = hash(master_seed, cell, replication).
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view cell_key,
                          std::uint64_t replication);

}  // namespace cso
