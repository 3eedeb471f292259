#include "xbarsim/rng.hpp"

namespace xbarsim {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t root, std::string_view stream, std::uint64_t index)
{
    // FNV-1a over the stream name
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : stream) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return splitmix64(splitmix64(root ^ h) + splitmix64(index));
}

double Rng::uniform(double lo, double hi)
{
    if (lo == hi)
        return lo;
    std::uniform_real_distribution<double> d(lo, hi);
    return d(engine_);
}

double Rng::normal(double mu, double sigma)
{
    if (sigma == 0.0)
        return mu;
    std::normal_distribution<double> d(mu, sigma);
    return d(engine_);
}

bool Rng::bernoulli(double p)
{
    if (p <= 0.0)
        return false;
    if (p >= 1.0)
        return true;
    return uniform(0.0, 1.0) < p;
}

}  // namespace xbarsim
