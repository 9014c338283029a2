#pragma once

#include <cstdint>
#include <initializer_list>

namespace opess {

// Deterministic random stream: xoshiro256++ state seeded through a
// splitmix64 absorption of a caller-supplied id list (seed, realization
// index, branch tag, chain index, ...). Streams built from the same ids
// produce the same variates no matter which thread runs them, which is what
// makes parallel Monte Carlo runs bit-reproducible.
//
// Distribution samplers are implemented here instead of <random> because the
// standard distributions are implementation-defined and would tie results to
// a particular standard library.
class RngStream {
 public:
  RngStream() : RngStream{0} {}
  RngStream(std::initializer_list<std::uint64_t> ids);

  static RngStream from_ids(std::initializer_list<std::uint64_t> ids) {
    return RngStream(ids);
  }

  std::uint64_t next_u64();

  // Uniform on [0,1) with 53-bit resolution.
  double uniform01();
  // Uniform on the open interval (0,1); safe to pass through log().
  double open01();
  // Standard normal, Box-Muller; the second variate of each pair is cached.
  double normal();
  // Gamma(shape, 1), Marsaglia-Tsang squeeze with the usual power boost for
  // shape < 1.
  double gamma(double shape);
  // Beta(a, b) as X / (X + Y) with X ~ Gamma(a), Y ~ Gamma(b).
  double beta(double a, double b);
  // Bernoulli(p), returned as 0.0 or 1.0.
  double bernoulli(double p);
  // Unbiased integer in [0, n) via Lemire's multiply-shift rejection.
  std::uint64_t below(std::uint64_t n);

 private:
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace opess
