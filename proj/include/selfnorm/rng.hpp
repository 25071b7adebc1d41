#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace selfnorm {

/// Identifies one reproducible random stream. The generator state is a pure
/// function of the pair; distinct stream indices give independent streams.
struct SeedStream {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;

  /// Stream for replication `r` of a computation keyed by this stream.
  /// Nested derivation keeps (seed, k).substream(r) distinct from
  /// (seed, k').substream(r) for k != k'.
  SeedStream substream(std::uint64_t r) const noexcept {
    return SeedStream{mix(master_seed ^ mix(stream_index + 0x632be59bd9b4e019ULL)), r};
  }

  friend bool operator==(const SeedStream&, const SeedStream&) = default;

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    // splitmix64 finalizer
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
};

class Rng {
 public:
  using engine_type = std::mt19937_64;

  explicit Rng(SeedStream s) : engine_(seeded(s)) {}

  /// Uniform on the open interval (0,1), 53-bit resolution.
  double uniform() noexcept {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double exponential() noexcept { return -std::log(uniform()); }

  /// Box-Muller; consumes exactly two uniforms per call.
  double normal() noexcept {
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    return r * std::cos(2.0 * std::numbers::pi * uniform());
  }

  std::uint64_t poisson(double mean) {
    std::poisson_distribution<std::uint64_t> dist(mean);
    return dist(engine_);
  }

  engine_type& engine() noexcept { return engine_; }

 private:
  static engine_type seeded(SeedStream s) {
    std::seed_seq seq{static_cast<std::uint32_t>(s.master_seed),
                      static_cast<std::uint32_t>(s.master_seed >> 32),
                      static_cast<std::uint32_t>(s.stream_index),
                      static_cast<std::uint32_t>(s.stream_index >> 32)};
    return engine_type(seq);
  }

  engine_type engine_;
};

}  // namespace selfnorm
