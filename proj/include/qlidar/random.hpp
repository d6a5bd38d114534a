// Seeded, splittable random source.
//
// Every stochastic operation takes a RandomStream by reference. Substreams are
// derived from (seed, path) by hashing, so trial k of an ensemble always sees
// the same numbers regardless of how many threads run the ensemble.

#pragma once

#include <cstdint>
#include <random>

namespace qlidar {

class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed, std::uint64_t stream_id = 0);

    /// Independent child stream; the parent is not advanced.
    RandomStream substream(std::uint64_t id) const;

    double normal();                 // N(0, 1)
    double normal(double variance);  // N(0, variance)
    double uniform();                // [0, 1)
    bool bit();                      // fair coin

    std::uint64_t key() const noexcept { return key_; }

private:
    std::uint64_t key_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> gauss_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace qlidar
