#pragma once

// Reproducible random streams: one independent generator per Monte Carlo
// realization, seeded from (master seed, realization index) so results do
// not depend on which thread ran which realization.

#include <complex>
#include <cstdint>
#include <random>

namespace scrambler {

std::uint64_t splitmix64(std::uint64_t& state);

std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t index);

class RngStream {
  public:
    explicit RngStream(std::uint64_t stream_seed) : engine_(stream_seed) {}

    double normal() { return normal_(engine_); }

    // E|z|^2 = variance, real and imaginary parts independent.
    std::complex<double> complex_normal(double variance);

    std::mt19937_64& engine() { return engine_; }

  private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace scrambler
