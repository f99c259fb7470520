#include "bvarml/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace bvarml {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t x = seed ^ (stream * 0xD2B74407B1CE6E93ULL + 0x8BADF00D5DEECE66ULL);
  std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(x)), static_cast<std::uint32_t>(splitmix64(x)),
                    static_cast<std::uint32_t>(splitmix64(x)), static_cast<std::uint32_t>(splitmix64(x)),
                    static_cast<std::uint32_t>(splitmix64(x)), static_cast<std::uint32_t>(splitmix64(x)),
                    static_cast<std::uint32_t>(splitmix64(x)), static_cast<std::uint32_t>(splitmix64(x))};
  return std::mt19937_64(seq);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : eng_(make_engine(seed, stream)), seed_(seed), stream_(stream) {}

RngStream RngStream::substream(std::uint64_t id) const {
  std::uint64_t x = stream_ ^ (0xA0761D6478BD642FULL * (id + 1));
  return RngStream(seed_, splitmix64(x));
}

double RngStream::uniform() {
  // 53-bit mantissa, shifted into (0,1).
  const std::uint64_t bits = eng_() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

double RngStream::normal(double mean, double var) { return mean + std::sqrt(var) * normal(); }

double RngStream::gamma(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0)) throw std::domain_error("gamma: shape and rate must be positive");
  if (shape < 1.0) {
    // Boost: G(a) = G(a+1) * U^{1/a}.
    const double u = uniform();
    return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
  }
}

int RngStream::categorical(const double* weights, int n) {
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += weights[i];
  double u = uniform() * total;
  for (int i = 0; i < n; ++i) {
    u -= weights[i];
    if (u <= 0.0) return i;
  }
  return n - 1;
}

}  // namespace bvarml
