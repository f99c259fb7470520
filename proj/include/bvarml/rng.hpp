#pragma once

#include <cstdint>
#include <random>

namespace bvarml {

// Seeded random stream. A (seed, stream) pair identifies the draw sequence:
// the same pair reproduces the same draws, distinct streams are independent
// and may run on different threads (each stream is single-owner).
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  // Derive a child stream, e.g. one per worker or per replication.
  RngStream substream(std::uint64_t id) const;

  std::uint64_t next_u64() { return eng_(); }

  // Uniform on (0,1); never returns 0 or 1.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Marsaglia polar; the spare value is cached.
  double normal();
  double normal(double mean, double var);

  // Exponential with unit rate.
  double exponential() { return -std::log(uniform()); }

  // Gamma(shape, rate) via Marsaglia-Tsang, boosted for shape < 1.
  double gamma(double shape, double rate);

  double chi_squared(double dof) { return gamma(0.5 * dof, 0.5); }
  double inverse_gamma(double shape, double scale) { return scale / gamma(shape, 1.0); }

  // Index draw from unnormalized weights.
  int categorical(const double* weights, int n);

 private:
  std::mt19937_64 eng_;
  std::uint64_t seed_ = 0;
  std::uint64_t stream_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace bvarml
