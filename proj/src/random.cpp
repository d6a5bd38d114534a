#include "qlidar/random.hpp"

#include <cmath>

namespace qlidar {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

namespace {

std::mt19937_64 seeded_engine(std::uint64_t key) {
    std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32),
                      static_cast<std::uint32_t>(splitmix64(key)),
                      static_cast<std::uint32_t>(splitmix64(key) >> 32)};
    return std::mt19937_64(seq);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_id)
    : key_(splitmix64(seed ^ splitmix64(stream_id))), engine_(seeded_engine(key_)) {}

RandomStream RandomStream::substream(std::uint64_t id) const {
    return RandomStream(key_, id + 1);
}

double RandomStream::normal() { return gauss_(engine_); }

double RandomStream::normal(double variance) { return std::sqrt(variance) * gauss_(engine_); }

double RandomStream::uniform() { return std::generate_canonical<double, 53>(engine_); }

bool RandomStream::bit() { return (engine_() >> 63) != 0; }

}  // namespace qlidar
