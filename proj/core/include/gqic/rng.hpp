#ifndef GQIC_RNG_HPP_
#define GQIC_RNG_HPP_

#include <array>
#include <cstdint>

namespace gqic {

// Counter-seeded xoshiro256++ stream. The pair (seed, stream_id) fully
// determines the output sequence, independent of platform and standard
// library, so every variate below is produced by our own transforms rather
// than by <random> distributions (whose algorithms are unspecified).
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64();

  // Uniform on the open interval (0, 1), 53 bits of resolution.
  double uniform();

  // Standard normal via the polar method; the second variate is cached.
  double normal();

  // Gamma(shape, rate = 1). Marsaglia-Tsang squeeze for shape >= 1, and the
  // U^{1/shape} boost for shape < 1 (computed in log space).
  double gamma(double shape);

  // Inverse Gaussian with the given mean and shape (Michael-Schucany-Haas).
  double inverse_gaussian(double mean, double shape);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::array<std::uint64_t, 4> s_{};
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

// Seed derivation used for Monte Carlo replications.
inline std::uint64_t replication_stream_id(std::uint64_t base_seed,
                                           std::uint64_t replication) {
  return base_seed ^ replication;
}

}  // namespace gqic

#endif  // GQIC_RNG_HPP_
