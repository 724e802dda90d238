#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "newsvendor/core.hpp"

// Cost estimators fed back into the weighted forecasters.
//
// The censored estimator is the importance-weighted
//
//   c~(i,d_t) = 1{I_t >= i} / P_t(I_t >= i) * (v_i' S_i e_{d_t} + beta)
//
// which is computable from sales alone: for any i <= I_t the sales the firm
// would have seen at level i equal min(i, sales). Adding beta makes every
// estimate nonnegative; the offset cancels in cost differences, which is all
// the regret criterion needs.

namespace newsvendor {

enum class InfoMode { censored, partially_censored, full };

inline const char* to_string(InfoMode m)
{
    switch (m) {
        case InfoMode::censored: return "censored";
        case InfoMode::partially_censored: return "partially-censored";
        case InfoMode::full: return "full";
    }
    return "?";
}

// true if feedback mode `provided` reveals at least as much as `required`
inline bool provides(InfoMode provided, InfoMode required)
{
    return static_cast<int>(provided) >= static_cast<int>(required);
}

// What the policy sees at the end of a period. `sales` is always present;
// the optional fields depend on the information mode of the run.
struct Feedback {
    int chosen_level = 0;                  // I_t
    int sales = 0;                         // min(I_t, d_t)
    std::optional<bool> lost_sales;        // 1{d_t <= I_t}, partially-censored mode
    std::optional<int> true_demand;        // d_t, full-information mode
};

// Probabilities aligned with ActionGrid::levels. `floor` records the
// exploration guarantee gamma/N when the producer provides one.
struct ActionDistribution {
    std::vector<double> probs;
    double floor = 0.0;
};

// P_t(I_t >= i) = sum of probabilities of grid levels >= i
inline double tail_probability(const ActionDistribution& dist, const ActionGrid& grid,
                               int level)
{
    if (dist.probs.size() != static_cast<std::size_t>(grid.size()))
        throw std::invalid_argument("distribution not aligned with grid");
    double tail = 0.0;
    for (int k = grid.size() - 1; k >= 0; --k) {
        if (grid.level(k) < level) break;
        tail += dist.probs[static_cast<std::size_t>(k)];
    }
    if (!(tail > 0.0))
        throw std::logic_error("zero tail probability; distribution lost its exploration floor");
    return tail;
}

// One estimate per grid level; level i gets 0 unless I_t >= i.
inline std::vector<double> estimate_costs(const Feedback& fb, const ActionDistribution& dist,
                                          const ActionGrid& grid, const CostParams& p)
{
    const double beta = p.beta();
    std::vector<double> est(static_cast<std::size_t>(grid.size()), 0.0);
    double tail = 0.0;
    // walk levels from the top so the tail sum is built incrementally
    for (int k = grid.size() - 1; k >= 0; --k) {
        const int i = grid.level(k);
        tail += dist.probs[static_cast<std::size_t>(k)];
        if (fb.chosen_level < i) continue;
        if (!(tail > 0.0))
            throw std::logic_error("zero tail probability for observed level");
        const int sales_at_i = std::min(i, fb.sales);
        est[static_cast<std::size_t>(k)] =
            (observed_value(i, sales_at_i, p) + beta) / tail;
    }
    return est;
}

// Analytic conditional mean of the estimator (Lemma "bias and variance"):
//   E_t[c~(i,d)] = v_i' S_i e_d + beta
inline double conditional_mean(int level, int demand, const CostParams& p)
{
    return observed_value(level, std::min(level, demand), p) + p.beta();
}

// Full-information replacement: the actual cost of every grid level.
inline std::vector<double> full_info_costs(int demand, const ActionGrid& grid,
                                           const CostParams& p)
{
    std::vector<double> costs(static_cast<std::size_t>(grid.size()));
    for (int k = 0; k < grid.size(); ++k)
        costs[static_cast<std::size_t>(k)] = newsvendor_cost(grid.level(k), demand, p);
    return costs;
}

}  // namespace newsvendor
