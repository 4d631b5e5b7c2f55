#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace mtrend {

/// One step of the SplitMix64 generator; advances `state`.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Combines a parent value with a child component into a new 64-bit id.
std::uint64_t hash_combine(std::uint64_t parent, std::uint64_t child) noexcept;

/// FNV-1a hash of a byte string. Stable across platforms and runs.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// Seed for replication stream `stream_id` under `master`. Streams derived
/// from distinct ids are statistically independent, so replications can be
/// run in any order or on any thread without changing their draws.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream_id) noexcept;

/// A private random stream: a 64-bit Mersenne twister plus ziggurat normals.
class Stream {
 public:
  explicit Stream(std::uint64_t seed);

  static Stream derive(std::uint64_t master, std::uint64_t stream_id) {
    return Stream(derive_seed(master, stream_id));
  }

  double normal();
  double uniform();

  /// Fills `out` with i.i.d. normal(0, sd^2) draws, in order.
  void fill_normal(std::span<double> out, double sd);

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mtrend
