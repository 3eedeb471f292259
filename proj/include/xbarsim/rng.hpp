#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace xbarsim {

std::uint64_t splitmix64(std::uint64_t x);

// Named sub-streams: derive_seed(root, "device", i) never collides with
// derive_seed(root, "noise", i), so changing one stage leaves the others intact.
std::uint64_t derive_seed(std::uint64_t root, std::string_view stream, std::uint64_t index = 0);

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo, double hi);
    double normal(double mu, double sigma);
    bool bernoulli(double p);
    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

}  // namespace xbarsim
