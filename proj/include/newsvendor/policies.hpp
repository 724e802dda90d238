#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "newsvendor/core.hpp"
#include "newsvendor/estimator.hpp"
#include "newsvendor/random.hpp"

namespace newsvendor {

// Uniform interface the arena drives. Per period: choose(t) is called once,
// the returned level is played, and observe() delivers the feedback exactly
// once. Policies are deterministic given (seed, feedback history).
class Policy {
public:
    virtual ~Policy() = default;

    virtual void reset(std::uint64_t seed) = 0;
    virtual int choose(long period) = 0;
    virtual void observe(const Feedback& fb) = 0;
    virtual std::string_view name() const = 0;
    virtual InfoMode required_info() const = 0;

    // Randomized policies expose the distribution the last level was drawn
    // from; deterministic baselines return nullptr.
    virtual const ActionDistribution* distribution() const { return nullptr; }
};

using PolicyFactory = std::function<std::unique_ptr<Policy>()>;

// ---------------------------------------------------------------------------
// Exponentially weighted forecaster.
//
//   W_i(t) = W_i(t-1) exp(-eta c~(i,d_t))
//   p_i(t) = (1-gamma) W_i(t-1)/W(t-1) + gamma/N
//
// Weights live in log domain with per-round max subtraction; eta times one
// importance-weighted estimate can reach ~1e6, which no linear-domain
// representation survives over 1e5 rounds.
// ---------------------------------------------------------------------------
class EwfPolicy : public Policy {
public:
    EwfPolicy(ActionGrid grid, CostParams params, double gamma, double eta,
              bool full_information = false)
        : grid_(std::move(grid)), params_(params), gamma_(gamma), eta_(eta),
          full_information_(full_information), rng_(0)
    {
        if (!(gamma > 0.0) || !(gamma <= 1.0))
            throw std::invalid_argument("gamma must lie in (0,1]");
        if (!(eta > 0.0))
            throw std::invalid_argument("eta must be positive");
        reset(0);
    }

    void reset(std::uint64_t seed) override
    {
        log_weights_.assign(static_cast<std::size_t>(grid_.size()), 0.0);
        rng_ = Rng(seed);
        dist_.probs.clear();
    }

    int choose(long) override
    {
        refresh_distribution();
        const int idx = rng_.categorical(dist_.probs);
        return grid_.level(idx);
    }

    void observe(const Feedback& fb) override
    {
        std::vector<double> est;
        if (full_information_) {
            if (!fb.true_demand)
                throw std::invalid_argument("ewf-full requires true demand feedback");
            est = full_info_costs(*fb.true_demand, grid_, params_);
        } else {
            est = estimate_costs(fb, dist_, grid_, params_);
        }
        apply_estimates(est);
    }

    // exposed for reuse by tests and by the tracking variant
    void apply_estimates(const std::vector<double>& est)
    {
        double hi = -1e300;
        for (int k = 0; k < grid_.size(); ++k) {
            log_weights_[static_cast<std::size_t>(k)] -= eta_ * est[static_cast<std::size_t>(k)];
            hi = std::max(hi, log_weights_[static_cast<std::size_t>(k)]);
        }
        for (auto& lw : log_weights_) lw -= hi;  // shift; distribution-invariant
    }

    const ActionDistribution* distribution() const override
    {
        return dist_.probs.empty() ? nullptr : &dist_;
    }

    std::string_view name() const override
    {
        return full_information_ ? "ewf-full" : "ewf";
    }

    InfoMode required_info() const override
    {
        return full_information_ ? InfoMode::full : InfoMode::censored;
    }

    const std::vector<double>& log_weights() const { return log_weights_; }
    const ActionGrid& grid() const { return grid_; }

    // p = (1-gamma) * softmax(log weights) + gamma/N
    void refresh_distribution()
    {
        const int n = grid_.size();
        dist_.probs.assign(static_cast<std::size_t>(n), 0.0);
        dist_.floor = gamma_ / n;
        double hi = log_weights_[0];
        for (double lw : log_weights_) hi = std::max(hi, lw);
        double sum = 0.0;
        for (int k = 0; k < n; ++k) {
            const double w = std::exp(log_weights_[static_cast<std::size_t>(k)] - hi);
            dist_.probs[static_cast<std::size_t>(k)] = w;
            sum += w;
        }
        for (auto& p : dist_.probs) p = (1.0 - gamma_) * (p / sum) + gamma_ / n;
    }

private:
    ActionGrid grid_;
    CostParams params_;
    double gamma_;
    double eta_;
    bool full_information_;
    Rng rng_;
    std::vector<double> log_weights_;
    ActionDistribution dist_;
};

// Exact fixed-share update, before any rescaling:
//   W_i(t) = W_i(t-1) exp(-eta c~_i) + (alpha/N) sum_j W_j(t-1)
inline std::vector<double> fsf_update(const std::vector<double>& weights,
                                      const std::vector<double>& est_costs,
                                      double eta, double alpha)
{
    const std::size_t n = weights.size();
    double total = 0.0;
    for (double w : weights) total += w;
    std::vector<double> next(n);
    for (std::size_t k = 0; k < n; ++k)
        next[k] = weights[k] * std::exp(-eta * est_costs[k]) + (alpha / static_cast<double>(n)) * total;
    return next;
}

// ---------------------------------------------------------------------------
// Fixed-share forecaster: the exponential update plus a uniform share of an
// alpha-fraction of the total weight, which keeps every weight alive and lets
// the policy track comparators that switch levels.
//
// The additive share term rules out a log-domain representation, so weights
// stay linear and are renormalized to sum 1 every round (a common positive
// rescale leaves the distribution unchanged). exp(-eta c~) may underflow to
// zero for a hammered level; the share term restores it to alpha/N.
// ---------------------------------------------------------------------------
class FsfPolicy : public Policy {
public:
    FsfPolicy(ActionGrid grid, CostParams params, double gamma, double eta, double alpha)
        : grid_(std::move(grid)), params_(params), gamma_(gamma), eta_(eta), alpha_(alpha),
          rng_(0)
    {
        if (!(gamma > 0.0) || !(gamma <= 1.0))
            throw std::invalid_argument("gamma must lie in (0,1]");
        if (!(eta > 0.0))
            throw std::invalid_argument("eta must be positive");
        if (!(alpha > 0.0) || !(alpha < 1.0))
            throw std::invalid_argument("alpha must lie in (0,1)");
        reset(0);
    }

    void reset(std::uint64_t seed) override
    {
        weights_.assign(static_cast<std::size_t>(grid_.size()),
                        1.0 / static_cast<double>(grid_.size()));
        rng_ = Rng(seed);
        dist_.probs.clear();
    }

    int choose(long) override
    {
        refresh_distribution();
        const int idx = rng_.categorical(dist_.probs);
        return grid_.level(idx);
    }

    void observe(const Feedback& fb) override
    {
        const auto est = estimate_costs(fb, dist_, grid_, params_);
        weights_ = fsf_update(weights_, est, eta_, alpha_);
        double total = 0.0;
        for (double w : weights_) total += w;
        for (auto& w : weights_) w /= total;
    }

    const ActionDistribution* distribution() const override
    {
        return dist_.probs.empty() ? nullptr : &dist_;
    }

    std::string_view name() const override { return "fsf"; }
    InfoMode required_info() const override { return InfoMode::censored; }
    const std::vector<double>& weights() const { return weights_; }

    void refresh_distribution()
    {
        const int n = grid_.size();
        double sum = 0.0;
        for (double w : weights_) sum += w;
        dist_.probs.assign(static_cast<std::size_t>(n), 0.0);
        dist_.floor = gamma_ / n;
        for (int k = 0; k < n; ++k)
            dist_.probs[static_cast<std::size_t>(k)] =
                (1.0 - gamma_) * (weights_[static_cast<std::size_t>(k)] / sum) + gamma_ / n;
    }

private:
    ActionGrid grid_;
    CostParams params_;
    double gamma_;
    double eta_;
    double alpha_;
    Rng rng_;
    std::vector<double> weights_;
    ActionDistribution dist_;
};

// ---------------------------------------------------------------------------
// Online-gradient-descent inventory policy. Maintains an auxiliary point
// x in [0, D], plays the randomized rounding I_t = floor(x) + Bernoulli(frac),
// and descends an estimate of the left derivative of c(., d_t):
//
//   unbiased (needs the lost-sales indicator 1{d <= I_t}):
//     g = -b + (h+b) 1{d <= I_t}      when I_t = floor(x)
//     g = -b + (h+b) 1{d <= I_t - 1}  when I_t = ceil(x)
//   sales-only surrogate:
//     g^ = -b + (h+b) 1{sales <= I_t - 1}
//
// The surrogate is biased: at I_t = floor(x) it misses the d = I_t case, so
// the policy keeps drifting upward and settles above the optimal level.
// ---------------------------------------------------------------------------
struct AimConfig {
    double step_scale;   // alpha_t = step_scale / sqrt(t)
    bool use_indicator;  // unbiased gradient; needs partially-censored feedback
    double start_point;

    static double default_step_scale(const CostParams& p)
    {
        return p.max_demand / (2.0 * (p.overage + p.underage));
    }
};

// floor(x) + Bernoulli(x - floor(x)); conditional expectation is x
inline int aim_round(double x, Rng& rng)
{
    const double fl = std::floor(x);
    const double frac = x - fl;
    return static_cast<int>(fl) + (rng.bernoulli(frac) ? 1 : 0);
}

class AimPolicy : public Policy {
public:
    AimPolicy(CostParams params, AimConfig cfg)
        : params_(params), cfg_(cfg), rng_(0)
    {
        if (!(cfg.step_scale > 0.0))
            throw std::invalid_argument("step scale must be positive");
        if (cfg.start_point < 0.0 || cfg.start_point > params.max_demand)
            throw std::invalid_argument("start point outside [0, D]");
        reset(0);
    }

    void reset(std::uint64_t seed) override
    {
        x_ = cfg_.start_point;
        t_ = 0;
        rng_ = Rng(seed);
    }

    int choose(long period) override
    {
        t_ = period;
        const double fl = std::floor(x_);
        const bool up = rng_.bernoulli(x_ - fl);
        ceil_branch_ = up;
        return static_cast<int>(fl) + (up ? 1 : 0);
    }

    void observe(const Feedback& fb) override
    {
        const double h = params_.overage;
        const double b = params_.underage;
        double g;
        if (cfg_.use_indicator && !ceil_branch_) {
            if (!fb.lost_sales)
                throw std::invalid_argument("aim-full requires the lost-sales indicator");
            g = -b + (h + b) * (*fb.lost_sales ? 1.0 : 0.0);
        } else {
            g = -b + (h + b) * (fb.sales <= fb.chosen_level - 1 ? 1.0 : 0.0);
        }
        const double step = cfg_.step_scale / std::sqrt(static_cast<double>(t_));
        x_ = std::clamp(x_ - step * g, 0.0, static_cast<double>(params_.max_demand));
    }

    std::string_view name() const override
    {
        return cfg_.use_indicator ? "aim-full" : "aim";
    }

    InfoMode required_info() const override
    {
        return cfg_.use_indicator ? InfoMode::partially_censored : InfoMode::censored;
    }

    double auxiliary_point() const { return x_; }

private:
    CostParams params_;
    AimConfig cfg_;
    Rng rng_;
    double x_ = 0.0;
    long t_ = 0;
    bool ceil_branch_ = false;
};

// ---------------------------------------------------------------------------
// Critical-quantile baselines.
// ---------------------------------------------------------------------------

// Smallest grid level whose empirical CDF reaches b/(b+h); smallest grid
// level on an empty history. Comparison is done as cum*(h+b) >= total*b so
// an exact tie counts as reaching the quantile.
inline int greedy_full_level(const std::vector<long>& demand_counts, const ActionGrid& grid,
                             const CostParams& p)
{
    long total = 0;
    for (long c : demand_counts) total += c;
    if (total == 0) return grid.min_level();
    const double rate_sum = p.overage + p.underage;
    long cum = 0;
    int next = 0;  // next histogram bin to fold in
    for (int k = 0; k < grid.size(); ++k) {
        const int lvl = grid.level(k);
        while (next <= lvl && next < static_cast<int>(demand_counts.size()))
            cum += demand_counts[static_cast<std::size_t>(next++)];
        if (static_cast<double>(cum) * rate_sum >= static_cast<double>(total) * p.underage)
            return lvl;
    }
    return grid.max_level();
}

// Orders the empirical critical quantile of the fully observed demands.
class GreedyFullPolicy : public Policy {
public:
    GreedyFullPolicy(ActionGrid grid, CostParams params)
        : grid_(std::move(grid)), params_(params)
    {
        reset(0);
    }

    void reset(std::uint64_t) override
    {
        counts_.assign(static_cast<std::size_t>(params_.max_demand) + 1, 0);
    }

    int choose(long) override { return greedy_full_level(counts_, grid_, params_); }

    void observe(const Feedback& fb) override
    {
        if (!fb.true_demand)
            throw std::invalid_argument("greedy-full requires true demand feedback");
        ++counts_[static_cast<std::size_t>(*fb.true_demand)];
    }

    std::string_view name() const override { return "greedy-full"; }
    InfoMode required_info() const override { return InfoMode::full; }

private:
    ActionGrid grid_;
    CostParams params_;
    std::vector<long> counts_;
};

// ---------------------------------------------------------------------------
// Alternating exploration and exploitation.
//
// Exploration phases start at ceil(base^k) (overlapping phases merge into one
// block) and last phase_len periods each; during a phase the policy orders
// the top grid level, which identifies the demand outright whenever it is
// <= D. Between phases it orders the empirical critical quantile of the
// collected samples. By default each new phase discards the previous one's
// samples, mirroring phase-based estimation without aggregation; `pooled`
// keeps everything.
// ---------------------------------------------------------------------------
struct AeeConfig {
    double phase_base = 2.718281828459045;
    int phase_len = 1;
    bool pooled = true;
};

// Maximal contiguous exploration blocks within [1, horizon].
inline std::vector<std::pair<long, long>> aee_phases(const AeeConfig& cfg, long horizon)
{
    if (!(cfg.phase_base > 1.0))
        throw std::invalid_argument("phase base must exceed 1");
    if (cfg.phase_len < 1)
        throw std::invalid_argument("phase length must be >= 1");
    std::vector<std::pair<long, long>> phases;
    long end = 0;
    for (int k = 0;; ++k) {
        const double raw = std::pow(cfg.phase_base, static_cast<double>(k));
        if (raw > static_cast<double>(horizon)) break;
        const long start = static_cast<long>(std::ceil(raw));
        if (start > horizon) break;
        // a phase whose scheduled start falls inside the previous phase is
        // deferred, so every phase contributes phase_len fresh periods
        const long s = std::max(start, end + 1);
        if (s > horizon) break;
        const long e = std::min(s + cfg.phase_len - 1, horizon);
        if (!phases.empty() && s == phases.back().second + 1)
            phases.back().second = e;  // touching blocks form one phase
        else
            phases.emplace_back(s, e);
        end = e;
    }
    return phases;
}

class AeePolicy : public Policy {
public:
    AeePolicy(ActionGrid grid, CostParams params, AeeConfig cfg = {})
        : grid_(std::move(grid)), params_(params), cfg_(cfg)
    {
        if (!(cfg_.phase_base > 1.0))
            throw std::invalid_argument("phase base must exceed 1");
        if (cfg_.phase_len < 1)
            throw std::invalid_argument("phase length must be >= 1");
        reset(0);
    }

    void reset(std::uint64_t) override
    {
        counts_.assign(static_cast<std::size_t>(params_.max_demand) + 1, 0);
        phases_.clear();
        known_until_ = 0;
        exploring_ = false;
        last_period_ = 0;
    }

    int choose(long period) override
    {
        const bool now = is_exploration(period);
        const bool entering = now && !exploring_;
        if (entering && !cfg_.pooled)
            counts_.assign(counts_.size(), 0);  // new phase, fresh estimate
        exploring_ = now;
        last_period_ = period;
        if (now) return grid_.max_level();
        return greedy_full_level(counts_, grid_, params_);
    }

    void observe(const Feedback& fb) override
    {
        if (!exploring_) return;  // estimates come from exploration phases only
        // demand is identified iff the order was not sold out, or covers D
        if (fb.sales < fb.chosen_level || fb.chosen_level >= params_.max_demand)
            ++counts_[static_cast<std::size_t>(fb.sales)];
    }

    std::string_view name() const override { return "aee"; }
    InfoMode required_info() const override { return InfoMode::censored; }

    bool is_exploration(long period)
    {
        extend_phases(period);
        for (const auto& [s, e] : phases_) {
            if (period < s) return false;
            if (period <= e) return true;
        }
        return false;
    }

private:
    void extend_phases(long period)
    {
        while (known_until_ < period) {
            known_until_ = std::max(known_until_ * 8 + 8, period);
            phases_ = aee_phases(cfg_, known_until_);
        }
    }

    ActionGrid grid_;
    CostParams params_;
    AeeConfig cfg_;
    std::vector<long> counts_;
    std::vector<std::pair<long, long>> phases_;
    long known_until_ = 0;
    bool exploring_ = false;
    long last_period_ = 0;
};

// Static baseline: always orders the same level.
class FixedLevelPolicy : public Policy {
public:
    FixedLevelPolicy(int level, const ActionGrid& grid) : level_(level)
    {
        if (!grid.contains(level))
            throw std::invalid_argument("fixed level not in grid");
    }

    void reset(std::uint64_t) override {}
    int choose(long) override { return level_; }
    void observe(const Feedback&) override {}
    std::string_view name() const override { return "fixed"; }
    InfoMode required_info() const override { return InfoMode::censored; }

private:
    int level_;
};

// ---------------------------------------------------------------------------
// Diagnostics.
// ---------------------------------------------------------------------------

// sum_i p_i / P(I >= i); the feedback-graph argument bounds this by
// 2 log(N^3/gamma + N + 2) + 2 for any distribution with floor gamma/N.
inline double exploration_ratio_sum(const ActionDistribution& dist, const ActionGrid& grid)
{
    double tail = 0.0;
    double sum = 0.0;
    for (int k = grid.size() - 1; k >= 0; --k) {
        tail += dist.probs[static_cast<std::size_t>(k)];
        sum += dist.probs[static_cast<std::size_t>(k)] / tail;
    }
    return sum;
}

inline double exploration_ratio_bound(int n_actions, double gamma)
{
    const double n = static_cast<double>(n_actions);
    return 2.0 * std::log(n * n * n / gamma + n + 2.0) + 2.0;
}

}  // namespace newsvendor
