#include "scrambler/rng.hpp"

#include <cmath>

namespace scrambler {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed;
    std::uint64_t base = splitmix64(s);
    std::uint64_t mix = base ^ (index * 0xd1b54a32d192ed03ULL);
    return splitmix64(mix);
}

std::complex<double> RngStream::complex_normal(double variance) {
    double sd = std::sqrt(0.5 * variance);
    double re = normal();
    double im = normal();
    return {sd * re, sd * im};
}

}  // namespace scrambler
