#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace ppinfer {

/*!
 * Reproducible, splittable pseudo-random stream.
 *
 * The generator is xoshiro256++ keyed through SplitMix64. A stream is
 * identified by its key; `split(id)` derives a statistically independent
 * child stream whose key depends only on the parent key and `id`, never on
 * how many variates the parent has produced. Per-chain and per-replication
 * work therefore gets the same numbers regardless of scheduling.
 *
 * Satisfies UniformRandomBitGenerator. Not shareable between threads.
 */
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed = 0);
  /// Same as `RngStream(seed).split(stream_id)`.
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  /// Independent child stream; deterministic in (key, id).
  [[nodiscard]] RngStream split(std::uint64_t id) const;

  result_type operator()();
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  /// Uniform on the open interval (0, 1); never returns 0 or 1.
  double uniform();
  /// Standard normal variate (Marsaglia polar method, second value discarded).
  double normal();
  /// Exponential variate with the given rate.
  double exponential(double rate);

  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  [[nodiscard]] std::uint64_t key() const { return key_; }
  /// Number of 64-bit words drawn so far.
  [[nodiscard]] std::uint64_t counter() const { return counter_; }

  friend bool operator==(const RngStream&, const RngStream&) = default;

 private:
  struct KeyTag {};
  RngStream(KeyTag, std::uint64_t seed, std::uint64_t key);
  void reseed_from_key();

  std::uint64_t seed_ = 0;
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  std::array<std::uint64_t, 4> s_{};
};

/// Gamma law G(shape, rate): density beta^alpha / Gamma(alpha) x^(alpha-1) e^(-beta x).
struct GammaParams {
  double shape = 1.0;
  double rate = 1.0;

  void validate() const;
  [[nodiscard]] double mean() const { return shape / rate; }
  [[nodiscard]] double variance() const { return shape / (rate * rate); }

  friend bool operator==(const GammaParams&, const GammaParams&) = default;
};

/// Inverse gamma law IG(shape, scale): density beta^alpha / Gamma(alpha) x^(-alpha-1) e^(-beta/x).
struct InvGammaParams {
  double shape = 1.0;
  double scale = 1.0;

  void validate() const;

  friend bool operator==(const InvGammaParams&, const InvGammaParams&) = default;
};

/*!
 * One draw from G(shape, rate).
 *
 * shape >= 1 uses the Marsaglia-Tsang squeeze/rejection construction with
 * d = shape - 1/3, c = 1/sqrt(9d). shape < 1 draws G(shape + 1) and multiplies
 * by U^(1/shape), evaluated in log space. Results that would underflow are
 * floored at the smallest normal double so downstream logs stay finite.
 */
double sample_gamma(RngStream& rng, const GammaParams& p);

/// Reciprocal of a G(shape, rate = scale) draw.
double sample_inverse_gamma(RngStream& rng, const InvGammaParams& p);
double sample_inverse_gamma(RngStream& rng, double shape, double scale);

}  // namespace ppinfer
