#include "mtrend/rng.hpp"

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

namespace mtrend {

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t hash_combine(std::uint64_t parent, std::uint64_t child) noexcept {
  std::uint64_t state = parent ^ (child * 0xD6E8FEB86659FD93ULL);
  splitmix64(state);
  return splitmix64(state);
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream_id) noexcept {
  return hash_combine(hash_combine(0x6D7472656E64ULL, master), stream_id);
}

Stream::Stream(std::uint64_t seed) : engine_(seed) {}

double Stream::normal() {
  boost::random::normal_distribution<double> dist;
  return dist(engine_);
}

double Stream::uniform() {
  boost::random::uniform_01<double> dist;
  return dist(engine_);
}

void Stream::fill_normal(std::span<double> out, double sd) {
  boost::random::normal_distribution<double> dist(0.0, sd);
  for (double& v : out) v = dist(engine_);
}

}  // namespace mtrend
