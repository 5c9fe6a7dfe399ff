#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace levcycle {

std::uint64_t splitmix64(std::uint64_t x);

// Seed for an independent stream keyed by (master, keys...).
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys);

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double normal() { return normal_(engine_); }
    double uniform() { return uniform_(engine_); }
    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace levcycle
