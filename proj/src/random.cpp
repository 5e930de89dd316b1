#include "ppinfer/random.hpp"

#include <cmath>
#include <string>

#include "ppinfer/error.hpp"

namespace ppinfer {

namespace {

constexpr std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t mix_key(std::uint64_t key, std::uint64_t id) {
  std::uint64_t x = key ^ (id * 0xd1342543de82ef95ULL + 0x632be59bd9b4e019ULL);
  splitmix64(x);
  return splitmix64(x);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

RngStream::RngStream(std::uint64_t seed) : seed_(seed), key_(mix_key(seed, 0)) { reseed_from_key(); }

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : RngStream(KeyTag{}, seed, mix_key(mix_key(seed, 0), stream_id)) {}

RngStream::RngStream(KeyTag, std::uint64_t seed, std::uint64_t key) : seed_(seed), key_(key) {
  reseed_from_key();
}

void RngStream::reseed_from_key() {
  std::uint64_t x = key_;
  for (auto& word : s_) word = splitmix64(x);
  counter_ = 0;
}

RngStream RngStream::split(std::uint64_t id) const { return {KeyTag{}, seed_, mix_key(key_, id)}; }

RngStream::result_type RngStream::operator()() {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  ++counter_;
  return result;
}

double RngStream::uniform() {
  // 53 random bits centred in their cell: strictly inside (0, 1).
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  return u * std::sqrt(-2.0 * std::log(s) / s);
}

double RngStream::exponential(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw ParameterError("exponential rate must be positive");
  return -std::log(uniform()) / rate;
}

void GammaParams::validate() const {
  if (!(shape > 0.0) || !(rate > 0.0) || !std::isfinite(shape) || !std::isfinite(rate)) {
    throw ParameterError("gamma parameters must be positive and finite (shape=" +
                         std::to_string(shape) + ", rate=" + std::to_string(rate) + ")");
  }
}

void InvGammaParams::validate() const {
  if (!(shape > 0.0) || !(scale > 0.0) || !std::isfinite(shape) || !std::isfinite(scale)) {
    throw ParameterError("inverse gamma parameters must be positive and finite (shape=" +
                         std::to_string(shape) + ", scale=" + std::to_string(scale) + ")");
  }
}

namespace {

// Marsaglia-Tsang for shape >= 1, unit rate.
double gamma_variate_ge1(RngStream& rng, double shape) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double z, v;
    do {
      z = rng.normal();
      v = 1.0 + c * z;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    const double z2 = z * z;
    if (u < 1.0 - 0.0331 * z2 * z2) return d * v;
    if (std::log(u) < 0.5 * z2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace

double sample_gamma(RngStream& rng, const GammaParams& p) {
  p.validate();
  double x;
  if (p.shape >= 1.0) {
    x = gamma_variate_ge1(rng, p.shape) / p.rate;
  } else {
    const double log_x = std::log(gamma_variate_ge1(rng, p.shape + 1.0)) +
                         std::log(rng.uniform()) / p.shape - std::log(p.rate);
    x = std::exp(log_x);
  }
  return std::fmax(x, std::numeric_limits<double>::min());
}

double sample_inverse_gamma(RngStream& rng, const InvGammaParams& p) {
  p.validate();
  return 1.0 / sample_gamma(rng, GammaParams{p.shape, p.scale});
}

double sample_inverse_gamma(RngStream& rng, double shape, double scale) {
  return sample_inverse_gamma(rng, InvGammaParams{shape, scale});
}

}  // namespace ppinfer
