#pragma once

#include "banditvote/types.hpp"

#include <cstdint>
#include <random>

namespace banditvote {

// Stream domains. Every consumer of randomness gets its own stream id so
// adding a rule or reordering the evaluation loop never disturbs the draws
// seen by anything else.
namespace stream {

inline constexpr std::uint64_t kInstance = 0;
inline constexpr std::uint64_t kPerturb = 1;
inline constexpr std::uint64_t kRule = 2;
inline constexpr std::uint64_t kTiebreak = 3;
inline constexpr std::uint64_t kTuningInstance = 4;
inline constexpr std::uint64_t kTuningPerturb = 5;
inline constexpr std::uint64_t kTuningTiebreak = 6;
inline constexpr std::uint64_t kTrain = 7;

inline constexpr std::uint64_t id(std::uint64_t domain, std::uint64_t index) {
  return (domain << 56) | index;
}

}  // namespace stream

// Deterministic (seed, stream) -> generator mapping. Distribution objects are
// constructed fresh on every call so a draw consumes a fixed amount of engine
// state regardless of call history.
class SeededRng {
 public:
  SeededRng(std::uint64_t seed, std::uint64_t stream_id) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream_id & 0xffffffffu),
                      static_cast<std::uint32_t>(stream_id >> 32)};
    engine_.seed(seq);
  }

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }

  // Inclusive on both ends.
  int uniform_int(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(engine_);
  }

  double normal(double mean, double stddev) {
    if (stddev == 0.0) return mean;
    return std::normal_distribution<double>(mean, stddev)(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// Argmax with uniform random tie-breaking among all entries within 1e-12 of
// the maximum.
int argmax_random_tiebreak(const Vec& scores, SeededRng& rng);

}  // namespace banditvote
