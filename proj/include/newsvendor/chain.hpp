#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "newsvendor/core.hpp"
#include "newsvendor/demand.hpp"
#include "newsvendor/random.hpp"
#include "newsvendor/tuning.hpp"

// Single-warehouse, K-retailer extension. Per period the manager allocates
// (i(1),...,i(K)) from the shared grid with sum <= r. Costs:
//
//   retailer k : f(k) 1{i>0} + h(k)(i-d)^+ + b(k)(d-i)^+
//   warehouse  : f(0) + h(0)(r - sum_k i(k))^+          ("push", default)
//                f(0) 1{sum_k i(k) > 0}                 ("pull")
//
// The exponential-weights policy runs directly on the enumerated allocation
// set; exploration picks one retailer and one grid level uniformly, filling
// the other retailers with a fixed level (0 when the grid has it).

namespace newsvendor {

struct RetailerParams {
    double fixed_order;  // f(k)
    double overage;      // h(k)
    double underage;     // b(k)
};

using Allocation = std::vector<int>;

class ChainParams {
public:
    ChainParams(std::vector<RetailerParams> retailers, double warehouse_fixed,
                double warehouse_overage, int replenishment, ActionGrid grid, int max_demand,
                bool pull = false, std::optional<int> exploration_fill = std::nullopt)
        : retailers_(std::move(retailers)), warehouse_fixed_(warehouse_fixed),
          warehouse_overage_(warehouse_overage), replenishment_(replenishment),
          grid_(std::move(grid)), max_demand_(max_demand), pull_(pull)
    {
        if (retailers_.empty())
            throw std::invalid_argument("need at least one retailer");
        for (const auto& r : retailers_) {
            if (!(r.overage > 0.0) || !(r.underage > 0.0))
                throw std::invalid_argument("retailer overage/underage rates must be positive");
            if (r.fixed_order < 0.0)
                throw std::invalid_argument("fixed ordering cost must be nonnegative");
        }
        if (warehouse_fixed_ < 0.0 || warehouse_overage_ < 0.0)
            throw std::invalid_argument("warehouse rates must be nonnegative");
        if (replenishment_ < grid_.max_level())
            throw std::invalid_argument("replenishment must cover the largest grid level");
        if (max_demand_ < 1)
            throw std::invalid_argument("max demand must be >= 1");
        fill_ = exploration_fill ? *exploration_fill
                                 : (grid_.contains(0) ? 0 : grid_.min_level());
        if (!grid_.contains(fill_))
            throw std::invalid_argument("exploration fill level must be in the grid");
        // every single-retailer exploration allocation must be feasible
        const long worst = static_cast<long>(grid_.max_level()) +
                           static_cast<long>(retailer_count() - 1) * fill_;
        if (worst > replenishment_)
            throw std::invalid_argument("exploration allocations exceed replenishment; "
                                        "lower the fill level or raise r");
    }

    int retailer_count() const { return static_cast<int>(retailers_.size()); }
    const RetailerParams& retailer(int k) const
    {
        return retailers_.at(static_cast<std::size_t>(k));
    }
    double warehouse_fixed() const { return warehouse_fixed_; }
    double warehouse_overage() const { return warehouse_overage_; }
    int replenishment() const { return replenishment_; }
    const ActionGrid& grid() const { return grid_; }
    int max_demand() const { return max_demand_; }
    bool pull() const { return pull_; }
    int exploration_fill() const { return fill_; }

    // beta = D * max{ h(0..K), b(1..K) }
    double beta() const
    {
        double rate = warehouse_overage_;
        for (const auto& r : retailers_) rate = std::max({rate, r.overage, r.underage});
        return max_demand_ * rate;
    }

    // f = max over f(0..K)
    double max_fixed() const
    {
        double f = warehouse_fixed_;
        for (const auto& r : retailers_) f = std::max(f, r.fixed_order);
        return f;
    }

    CostParams retailer_cost_params(int k) const
    {
        const auto& r = retailer(k);
        return CostParams(r.overage, r.underage, max_demand_);
    }

private:
    std::vector<RetailerParams> retailers_;
    double warehouse_fixed_;
    double warehouse_overage_;
    int replenishment_;
    ActionGrid grid_;
    int max_demand_;
    bool pull_;
    int fill_ = 0;
};

inline double retailer_cost(int k, int level, int demand, const ChainParams& chain)
{
    const auto& r = chain.retailer(k);
    return r.fixed_order * (level > 0 ? 1.0 : 0.0) +
           r.overage * std::max(level - demand, 0) +
           r.underage * std::max(demand - level, 0);
}

inline double warehouse_cost(const Allocation& alloc, const ChainParams& chain)
{
    long total = 0;
    for (int lv : alloc) total += lv;
    if (chain.pull())
        return chain.warehouse_fixed() * (total > 0 ? 1.0 : 0.0);
    return chain.warehouse_fixed() +
           chain.warehouse_overage() * static_cast<double>(std::max<long>(chain.replenishment() - total, 0));
}

inline double chain_cost(const Allocation& alloc, std::span<const int> demands,
                         const ChainParams& chain)
{
    double total = warehouse_cost(alloc, chain);
    for (int k = 0; k < chain.retailer_count(); ++k)
        total += retailer_cost(k, alloc[static_cast<std::size_t>(k)],
                               demands[static_cast<std::size_t>(k)], chain);
    return total;
}

// Enumerated feasible set A_r = { alloc in grid^K : sum <= r }, in
// lexicographic order, with O(1) index lookup.
class AllocationSpace {
public:
    explicit AllocationSpace(const ChainParams& chain, std::size_t cap = 1 << 20)
        : n_levels_(chain.grid().size())
    {
        Allocation current(static_cast<std::size_t>(chain.retailer_count()), 0);
        enumerate(chain, 0, chain.replenishment(), current, cap);
        for (std::size_t i = 0; i < allocations_.size(); ++i)
            index_.emplace(key(allocations_[i], chain.grid()), i);
    }

    int size() const { return static_cast<int>(allocations_.size()); }
    const Allocation& at(int i) const { return allocations_.at(static_cast<std::size_t>(i)); }
    const std::vector<Allocation>& all() const { return allocations_; }

    int index_of(const Allocation& alloc, const ActionGrid& grid) const
    {
        auto it = index_.find(key(alloc, grid));
        if (it == index_.end())
            throw std::invalid_argument("allocation not in the feasible set");
        return static_cast<int>(it->second);
    }

private:
    void enumerate(const ChainParams& chain, int k, int budget, Allocation& current,
                   std::size_t cap)
    {
        if (k == chain.retailer_count()) {
            if (allocations_.size() >= cap)
                throw std::runtime_error(
                    "allocation set exceeds the enumeration cap (" + std::to_string(cap) +
                    "); reduce K, the grid size, or r");
            allocations_.push_back(current);
            return;
        }
        for (int j = 0; j < chain.grid().size(); ++j) {
            const int lv = chain.grid().level(j);
            if (lv > budget) break;
            current[static_cast<std::size_t>(k)] = lv;
            enumerate(chain, k + 1, budget - lv, current, cap);
        }
        current[static_cast<std::size_t>(k)] = chain.grid().min_level();
    }

    std::uint64_t key(const Allocation& alloc, const ActionGrid& grid) const
    {
        std::uint64_t h = 0;
        for (int lv : alloc) h = h * static_cast<std::uint64_t>(n_levels_ + 1) +
                                 static_cast<std::uint64_t>(grid.index_of(lv)) + 1;
        return h;
    }

    int n_levels_;
    std::vector<Allocation> allocations_;
    std::unordered_map<std::uint64_t, std::size_t> index_;
};

// Exploration pmf mu: retailer kappa uniform on {1..K}, level uniform on the
// grid, remaining retailers at the fill level; coinciding allocations pool
// their mass.
inline std::vector<double> exploration_pmf(const ChainParams& chain, const AllocationSpace& space)
{
    const int K = chain.retailer_count();
    const int N = chain.grid().size();
    std::vector<double> pmf(static_cast<std::size_t>(space.size()), 0.0);
    const double mass = 1.0 / (static_cast<double>(K) * static_cast<double>(N));
    Allocation alloc(static_cast<std::size_t>(K), chain.exploration_fill());
    for (int kappa = 0; kappa < K; ++kappa) {
        for (int j = 0; j < N; ++j) {
            alloc[static_cast<std::size_t>(kappa)] = chain.grid().level(j);
            pmf[static_cast<std::size_t>(space.index_of(alloc, chain.grid()))] += mass;
        }
        alloc[static_cast<std::size_t>(kappa)] = chain.exploration_fill();
    }
    return pmf;
}

struct AllocationDistribution {
    std::vector<double> probs;  // aligned with AllocationSpace order
};

// P_t(I(k) >= level) under the allocation distribution
inline double marginal_tail(const AllocationDistribution& dist, const AllocationSpace& space,
                            int k, int level)
{
    double tail = 0.0;
    for (int i = 0; i < space.size(); ++i)
        if (space.at(i)[static_cast<std::size_t>(k)] >= level)
            tail += dist.probs[static_cast<std::size_t>(i)];
    return tail;
}

struct ChainFeedback {
    Allocation chosen;        // I_t(1..K)
    std::vector<int> sales;   // min(I_t(k), d_t(k)) per retailer
};

// Estimated cost of every feasible allocation:
//   c~(alloc) = c0(alloc, r) + sum_k 1{I(k) >= i(k)} / P_t(I(k) >= i(k))
//               * ( v_i' S_i e_d(k) + f(k) 1{i(k)>0} + beta )
// with retailer k's own (h,b) in the observation term.
inline std::vector<double> estimate_allocation_costs(const ChainFeedback& fb,
                                                     const AllocationDistribution& dist,
                                                     const AllocationSpace& space,
                                                     const ChainParams& chain)
{
    const int K = chain.retailer_count();
    const int N = chain.grid().size();
    const double beta = chain.beta();

    // marginal tails for all (retailer, level) in one sweep
    std::vector<double> level_mass(static_cast<std::size_t>(K * N), 0.0);
    for (int i = 0; i < space.size(); ++i) {
        const Allocation& a = space.at(i);
        const double pr = dist.probs[static_cast<std::size_t>(i)];
        for (int k = 0; k < K; ++k)
            level_mass[static_cast<std::size_t>(k * N +
                       chain.grid().index_of(a[static_cast<std::size_t>(k)]))] += pr;
    }
    std::vector<double> tails(static_cast<std::size_t>(K * N), 0.0);
    for (int k = 0; k < K; ++k) {
        double acc = 0.0;
        for (int j = N - 1; j >= 0; --j) {
            acc += level_mass[static_cast<std::size_t>(k * N + j)];
            tails[static_cast<std::size_t>(k * N + j)] = acc;
        }
    }

    // per-retailer per-level estimates
    std::vector<double> part(static_cast<std::size_t>(K * N), 0.0);
    for (int k = 0; k < K; ++k) {
        const auto& r = chain.retailer(k);
        const CostParams pk(r.overage, r.underage, chain.max_demand());
        const int chosen = fb.chosen[static_cast<std::size_t>(k)];
        const int sales = fb.sales[static_cast<std::size_t>(k)];
        for (int j = 0; j < N; ++j) {
            const int i = chain.grid().level(j);
            if (chosen < i) continue;
            const double tail = tails[static_cast<std::size_t>(k * N + j)];
            if (!(tail > 0.0))
                throw std::logic_error("zero marginal tail for observed allocation");
            part[static_cast<std::size_t>(k * N + j)] =
                (observed_value(i, std::min(i, sales), pk) +
                 r.fixed_order * (i > 0 ? 1.0 : 0.0) + beta) / tail;
        }
    }

    std::vector<double> est(static_cast<std::size_t>(space.size()), 0.0);
    for (int i = 0; i < space.size(); ++i) {
        const Allocation& a = space.at(i);
        double v = warehouse_cost(a, chain);
        for (int k = 0; k < K; ++k)
            v += part[static_cast<std::size_t>(k * N +
                 chain.grid().index_of(a[static_cast<std::size_t>(k)]))];
        est[static_cast<std::size_t>(i)] = v;
    }
    return est;
}

// ---------------------------------------------------------------------------
// Exponential weights over the allocation set, mixed with gamma * mu.
// ---------------------------------------------------------------------------
class CombinatorialEwfPolicy {
public:
    CombinatorialEwfPolicy(ChainParams chain, double gamma, double eta,
                           std::size_t enumeration_cap = 1 << 20)
        : chain_(std::move(chain)), space_(chain_, enumeration_cap),
          mu_(exploration_pmf(chain_, space_)), gamma_(gamma), eta_(eta), rng_(0)
    {
        if (!(gamma > 0.0) || !(gamma < 1.0))
            throw std::invalid_argument("gamma must lie in (0,1)");
        if (!(eta > 0.0))
            throw std::invalid_argument("eta must be positive");
        reset(0);
    }

    void reset(std::uint64_t seed)
    {
        log_weights_.assign(static_cast<std::size_t>(space_.size()), 0.0);
        rng_ = Rng(seed);
        dist_.probs.clear();
    }

    const Allocation& choose(long)
    {
        refresh_distribution();
        const int idx = rng_.categorical(dist_.probs);
        return space_.at(idx);
    }

    void observe(const ChainFeedback& fb)
    {
        apply_estimates(estimate_allocation_costs(fb, dist_, space_, chain_));
    }

    void apply_estimates(const std::vector<double>& est)
    {
        double hi = -1e300;
        for (std::size_t i = 0; i < log_weights_.size(); ++i) {
            log_weights_[i] -= eta_ * est[i];
            hi = std::max(hi, log_weights_[i]);
        }
        for (auto& lw : log_weights_) lw -= hi;
    }

    // p = (1-gamma) * softmax(log weights) + gamma * mu
    void refresh_distribution()
    {
        const std::size_t m = log_weights_.size();
        dist_.probs.assign(m, 0.0);
        double hi = log_weights_[0];
        for (double lw : log_weights_) hi = std::max(hi, lw);
        double sum = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double w = std::exp(log_weights_[i] - hi);
            dist_.probs[i] = w;
            sum += w;
        }
        for (std::size_t i = 0; i < m; ++i)
            dist_.probs[i] = (1.0 - gamma_) * (dist_.probs[i] / sum) + gamma_ * mu_[i];
    }

    const AllocationDistribution& distribution() const { return dist_; }
    const AllocationSpace& space() const { return space_; }
    const ChainParams& chain() const { return chain_; }
    const std::vector<double>& exploration_distribution() const { return mu_; }

private:
    ChainParams chain_;
    AllocationSpace space_;
    std::vector<double> mu_;
    double gamma_;
    double eta_;
    Rng rng_;
    std::vector<double> log_weights_;
    AllocationDistribution dist_;
};

// ---------------------------------------------------------------------------
// Simulation loop and hindsight benchmark for the chain.
// ---------------------------------------------------------------------------

struct ChainRunRecord {
    std::vector<Allocation> allocations;
    std::vector<double> costs;
    std::vector<double> cum_costs;
    std::vector<double> best_fixed_prefix;  // prefix cost of the best fixed allocation
};

// demands: K streams of equal length
inline ChainRunRecord run_chain_once(CombinatorialEwfPolicy& policy,
                                     const std::vector<std::vector<int>>& demands,
                                     std::uint64_t seed)
{
    const ChainParams& chain = policy.chain();
    const int K = chain.retailer_count();
    if (static_cast<int>(demands.size()) != K)
        throw std::invalid_argument("need one demand stream per retailer");
    const std::size_t horizon = demands.front().size();
    for (const auto& d : demands)
        if (d.size() != horizon)
            throw std::invalid_argument("retailer demand streams must share the horizon");

    const AllocationSpace& space = policy.space();
    std::vector<double> alloc_cum(static_cast<std::size_t>(space.size()), 0.0);

    ChainRunRecord rec;
    rec.allocations.reserve(horizon);
    rec.costs.resize(horizon);
    rec.cum_costs.resize(horizon);
    rec.best_fixed_prefix.resize(horizon);

    policy.reset(seed);
    std::vector<int> d_now(static_cast<std::size_t>(K));
    double cum = 0.0;
    for (std::size_t t = 0; t < horizon; ++t) {
        for (int k = 0; k < K; ++k) d_now[static_cast<std::size_t>(k)] = demands[static_cast<std::size_t>(k)][t];
        const Allocation alloc = policy.choose(static_cast<long>(t + 1));
        const double cost = chain_cost(alloc, d_now, chain);
        cum += cost;
        rec.allocations.push_back(alloc);
        rec.costs[t] = cost;
        rec.cum_costs[t] = cum;

        // prefix benchmark over the enumerated set
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < space.size(); ++i) {
            alloc_cum[static_cast<std::size_t>(i)] += chain_cost(space.at(i), d_now, chain);
            best = std::min(best, alloc_cum[static_cast<std::size_t>(i)]);
        }
        rec.best_fixed_prefix[t] = best;

        ChainFeedback fb;
        fb.chosen = alloc;
        fb.sales.resize(static_cast<std::size_t>(K));
        for (int k = 0; k < K; ++k)
            fb.sales[static_cast<std::size_t>(k)] =
                std::min(alloc[static_cast<std::size_t>(k)], d_now[static_cast<std::size_t>(k)]);
        policy.observe(fb);
    }
    return rec;
}

}  // namespace newsvendor
