#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

// Single-period newsvendor cost model on an integer demand range {0..D},
// plus the sales-feedback machinery that makes cost differences learnable
// from censored observations:
//
//   c(i,d)  = h*(i-d)^+ + b*(d-i)^+
//   v_i(k)  = h*i - (h+b)*(k-1),  k = 1..i+1
//   S_i     = [L_{i+1} | M_{i+1}]   (sales = min(i,d), one-hot per demand)
//
// and the identity (v_i' S_i - v_j' S_j) e_d = c(i,d) - c(j,d) for all d,
// which is what every estimator in this library is built on.

namespace newsvendor {

struct CostParams {
    double overage;    // h, cost per leftover unit
    double underage;   // b, cost per unit of unmet demand
    int max_demand;    // D, demand lives in {0..D}

    CostParams(double h, double b, int d_max)
        : overage(h), underage(b), max_demand(d_max)
    {
        if (!(h > 0.0) || !std::isfinite(h))
            throw std::invalid_argument("overage rate must be positive");
        if (!(b > 0.0) || !std::isfinite(b))
            throw std::invalid_argument("underage rate must be positive");
        if (d_max < 1)
            throw std::invalid_argument("max demand must be >= 1");
    }

    // beta = D * max{h,b}; uniform bound on |c| and on |v_i' S_i e_d|.
    double beta() const { return max_demand * std::max(overage, underage); }
};

// Ordered set of inventory levels the policy may choose from.
class ActionGrid {
public:
    ActionGrid(std::vector<int> levels, int max_demand)
        : levels_(std::move(levels))
    {
        if (levels_.empty())
            throw std::invalid_argument("action grid must be nonempty");
        for (std::size_t k = 0; k < levels_.size(); ++k) {
            if (levels_[k] < 0 || levels_[k] > max_demand)
                throw std::invalid_argument("grid level outside [0, D]");
            if (k > 0 && levels_[k] <= levels_[k - 1])
                throw std::invalid_argument("grid levels must be strictly increasing");
        }
    }

    const std::vector<int>& levels() const { return levels_; }
    int size() const { return static_cast<int>(levels_.size()); }
    int level(int index) const { return levels_.at(static_cast<std::size_t>(index)); }
    int min_level() const { return levels_.front(); }
    int max_level() const { return levels_.back(); }

    int index_of(int level) const
    {
        auto it = std::lower_bound(levels_.begin(), levels_.end(), level);
        if (it == levels_.end() || *it != level)
            throw std::invalid_argument("level " + std::to_string(level) + " not in grid");
        return static_cast<int>(it - levels_.begin());
    }

    bool contains(int level) const
    {
        return std::binary_search(levels_.begin(), levels_.end(), level);
    }

private:
    std::vector<int> levels_;
};

inline ActionGrid full_grid(int max_demand)
{
    std::vector<int> lv(static_cast<std::size_t>(max_demand) + 1);
    for (int i = 0; i <= max_demand; ++i) lv[static_cast<std::size_t>(i)] = i;
    return ActionGrid(std::move(lv), max_demand);
}

inline double newsvendor_cost(int level, int demand, const CostParams& p)
{
    return p.overage * std::max(level - demand, 0) +
           p.underage * std::max(demand - level, 0);
}

// c(i,d) - c(j,d) in closed form. Cases for i > j:
//   d <= j     : h*(i-j)
//   j < d < i  : h*i + b*j - (h+b)*d
//   d >= i     : b*(j-i)
inline double cost_difference(int i, int j, int demand, const CostParams& p)
{
    if (i == j) return 0.0;
    if (i < j) return -cost_difference(j, i, demand, p);
    if (demand <= j) return p.overage * (i - j);
    if (demand >= i) return p.underage * (j - i);
    return p.overage * i + p.underage * j - (p.overage + p.underage) * demand;
}

// v_i' S_i e_d, evaluated via sales = min(i,d):
//   observed_value(i, min(i,d)) = h*i - (h+b)*min(i,d)
// Computable from censored feedback min(I_t,d) whenever I_t >= i.
inline double observed_value(int level, int sales_at_level, const CostParams& p)
{
    if (sales_at_level < 0 || sales_at_level > level)
        throw std::invalid_argument("sales must lie in [0, level]");
    return p.overage * level - (p.overage + p.underage) * sales_at_level;
}

// Self-test of the construction: (v_i' S_i - v_j' S_j) e_d = c(i,d) - c(j,d)
// for every demand in {0..D}.
inline bool check_local_observability(int i, int j, const CostParams& p,
                                      double tol = 1e-9)
{
    for (int d = 0; d <= p.max_demand; ++d) {
        double lhs = observed_value(i, std::min(i, d), p) -
                     observed_value(j, std::min(j, d), p);
        double rhs = cost_difference(i, j, d, p);
        if (std::abs(lhs - rhs) > tol) return false;
    }
    return true;
}

// Dense signal matrix S_i, materialized for tests and docs only; the hot
// paths use observed_value instead. Column d has its single 1 in row
// min(i,d), i.e. S_i = [L_{i+1} | M_{i+1}].
struct SignalMatrix {
    int level;
    std::vector<std::vector<std::uint8_t>> entries;  // (level+1) x (D+1)

    static SignalMatrix build(int level, int max_demand)
    {
        if (level < 0 || level > max_demand)
            throw std::invalid_argument("level outside [0, D]");
        SignalMatrix s;
        s.level = level;
        s.entries.assign(static_cast<std::size_t>(level) + 1,
                         std::vector<std::uint8_t>(static_cast<std::size_t>(max_demand) + 1, 0));
        for (int d = 0; d <= max_demand; ++d)
            s.entries[static_cast<std::size_t>(std::min(level, d))][static_cast<std::size_t>(d)] = 1;
        return s;
    }
};

// Dense v_i, entry k (1-indexed) = h*i - (h+b)*(k-1). Tests/docs only.
struct ObservationVector {
    int level;
    std::vector<double> entries;  // size level+1

    static ObservationVector build(int level, const CostParams& p)
    {
        if (level < 0 || level > p.max_demand)
            throw std::invalid_argument("level outside [0, D]");
        ObservationVector v;
        v.level = level;
        v.entries.resize(static_cast<std::size_t>(level) + 1);
        for (int k = 1; k <= level + 1; ++k)
            v.entries[static_cast<std::size_t>(k - 1)] =
                p.overage * level - (p.overage + p.underage) * (k - 1);
        return v;
    }
};

}  // namespace newsvendor
