#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <stdexcept>

// Reproducibility notes: all sampling goes through this header. We use the
// standardized mt19937_64 engine but avoid std::*_distribution, whose output
// is implementation-defined; uniform/bernoulli/categorical are spelled out
// so that identical seeds give identical traces on every platform.

namespace newsvendor {

inline std::uint64_t splitmix64(std::uint64_t& state)
{
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Derive a child seed from a base seed and a list of stream tags
// (policy index, run index, purpose, ...).
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags)
{
    std::uint64_t s = base;
    std::uint64_t out = splitmix64(s);
    for (std::uint64_t t : tags) {
        s ^= t + 0x9e3779b97f4a7c15ULL + (out << 6) + (out >> 2);
        out = splitmix64(s);
    }
    return out;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // uniform in [0,1), 53-bit resolution
    double uniform()
    {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return uniform() < p; }

    int binomial(int trials, double q)
    {
        int s = 0;
        for (int i = 0; i < trials; ++i) s += bernoulli(q) ? 1 : 0;
        return s;
    }

    // inverse-CDF draw; probabilities need not be perfectly normalized,
    // the last index absorbs rounding slack
    int categorical(std::span<const double> probs)
    {
        if (probs.empty())
            throw std::invalid_argument("categorical: empty support");
        double u = uniform();
        double acc = 0.0;
        for (std::size_t k = 0; k + 1 < probs.size(); ++k) {
            acc += probs[k];
            if (u < acc) return static_cast<int>(k);
        }
        return static_cast<int>(probs.size() - 1);
    }

    std::uint64_t raw() { return gen_(); }

private:
    std::mt19937_64 gen_;
};

}  // namespace newsvendor
