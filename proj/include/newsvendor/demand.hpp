#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "newsvendor/random.hpp"

namespace newsvendor {

// Demand sequence generators. All kinds emit integers in [0, cap] and are
// deterministic given (spec, seed).
struct DemandSpec {
    enum class Kind { iid_binomial, shifted_binomial, constant, scripted };

    Kind kind = Kind::iid_binomial;
    int trials = 30;       // binomial kinds
    double q = 0.5;        // binomial success probability
    double q_low = 0.1;    // success probability inside the shifted window
    int value = 0;         // constant kind
    std::string path;      // scripted kind
};

// The shifted-binomial window [ceil(T/5), floor(T/2)], closed, 1-based.
inline std::pair<long, long> shift_window(long horizon)
{
    return {(horizon + 4) / 5, horizon / 2};
}

inline std::vector<int> load_scripted_demands(const std::string& path, long horizon, int cap)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open demand file: " + path);
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(horizon));
    std::string line;
    long lineno = 0;
    while (static_cast<long>(out.size()) < horizon && std::getline(in, line)) {
        ++lineno;
        std::istringstream ss(line);
        long v;
        if (!(ss >> v))
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": not an integer");
        if (v < 0 || v > cap)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": demand " + std::to_string(v) + " outside [0, " +
                                     std::to_string(cap) + "]");
        out.push_back(static_cast<int>(v));
    }
    if (static_cast<long>(out.size()) < horizon)
        throw std::runtime_error(path + ": only " + std::to_string(out.size()) +
                                 " demands, need " + std::to_string(horizon));
    return out;
}

inline std::vector<int> generate_demands(const DemandSpec& spec, long horizon,
                                         std::uint64_t seed, int cap)
{
    if (horizon < 1)
        throw std::invalid_argument("horizon must be >= 1");
    using Kind = DemandSpec::Kind;
    if (spec.kind == Kind::scripted)
        return load_scripted_demands(spec.path, horizon, cap);

    std::vector<int> out(static_cast<std::size_t>(horizon));
    Rng rng(seed);
    switch (spec.kind) {
        case Kind::constant: {
            if (spec.value < 0 || spec.value > cap)
                throw std::invalid_argument("constant demand outside [0, D]");
            for (auto& d : out) d = spec.value;
            break;
        }
        case Kind::iid_binomial: {
            if (spec.trials < 0 || spec.trials > cap)
                throw std::invalid_argument("binomial trials must lie in [0, D]");
            for (auto& d : out) d = rng.binomial(spec.trials, spec.q);
            break;
        }
        case Kind::shifted_binomial: {
            if (spec.trials < 0 || spec.trials > cap)
                throw std::invalid_argument("binomial trials must lie in [0, D]");
            auto [lo, hi] = shift_window(horizon);
            for (long t = 1; t <= horizon; ++t) {
                const double qt = (t >= lo && t <= hi) ? spec.q_low : spec.q;
                out[static_cast<std::size_t>(t - 1)] = rng.binomial(spec.trials, qt);
            }
            break;
        }
        case Kind::scripted:
            break;  // handled above
    }
    return out;
}

}  // namespace newsvendor
