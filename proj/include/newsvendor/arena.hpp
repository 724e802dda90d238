#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "newsvendor/core.hpp"
#include "newsvendor/demand.hpp"
#include "newsvendor/estimator.hpp"
#include "newsvendor/policies.hpp"

namespace newsvendor {

// ---------------------------------------------------------------------------
// Single run of the repeated game: the policy picks a level, the demand is
// revealed, cost accrues, and feedback is delivered according to the
// information mode of the run.
// ---------------------------------------------------------------------------

struct RunRecord {
    std::string policy;
    std::uint64_t seed = 0;
    std::vector<int> levels;
    std::vector<int> demands;
    std::vector<double> costs;
    std::vector<double> cum_costs;
    // cumulative sum of E[c | p_t] = sum_i p_i(t) c(i,d_t); filled only for
    // policies that expose their distribution
    std::vector<double> cum_expected_costs;
};

struct RoundHook {
    virtual ~RoundHook() = default;
    virtual void on_round(long period, const Policy& policy, int level, int demand) = 0;
};

inline Feedback make_feedback(int level, int demand, InfoMode provided)
{
    Feedback fb;
    fb.chosen_level = level;
    fb.sales = std::min(level, demand);
    if (provides(provided, InfoMode::partially_censored))
        fb.lost_sales = (demand <= level);
    if (provides(provided, InfoMode::full))
        fb.true_demand = demand;
    return fb;
}

inline RunRecord run_once(Policy& policy, std::span<const int> demands, const ActionGrid& grid,
                          const CostParams& p, InfoMode provided, std::uint64_t seed,
                          RoundHook* hook = nullptr)
{
    if (!provides(provided, policy.required_info()))
        throw std::invalid_argument(std::string(policy.name()) + " needs " +
                                    to_string(policy.required_info()) + " feedback but the run provides " +
                                    to_string(provided));
    const long horizon = static_cast<long>(demands.size());
    RunRecord rec;
    rec.policy = std::string(policy.name());
    rec.seed = seed;
    rec.levels.resize(demands.size());
    rec.demands.assign(demands.begin(), demands.end());
    rec.costs.resize(demands.size());
    rec.cum_costs.resize(demands.size());

    policy.reset(seed);
    double cum = 0.0;
    double cum_expected = 0.0;
    bool track_expected = false;
    for (long t = 1; t <= horizon; ++t) {
        const std::size_t k = static_cast<std::size_t>(t - 1);
        const int level = policy.choose(t);
        if (level < 0 || level > p.max_demand)
            throw std::logic_error("policy chose level outside [0, D]");
        const int d = demands[k];
        const double cost = newsvendor_cost(level, d, p);
        cum += cost;
        rec.levels[k] = level;
        rec.costs[k] = cost;
        rec.cum_costs[k] = cum;

        const ActionDistribution* dist = policy.distribution();
        if (t == 1 && dist) {
            track_expected = true;
            rec.cum_expected_costs.resize(rec.cum_costs.size());
        }
        if (track_expected && dist) {
            double e = 0.0;
            for (int j = 0; j < grid.size(); ++j)
                e += dist->probs[static_cast<std::size_t>(j)] *
                     newsvendor_cost(grid.level(j), d, p);
            cum_expected += e;
            rec.cum_expected_costs[k] = cum_expected;
        }
        if (hook) hook->on_round(t, policy, level, d);
        policy.observe(make_feedback(level, d, provided));
    }
    return rec;
}

// ---------------------------------------------------------------------------
// Hindsight benchmarks.
// ---------------------------------------------------------------------------

struct BestFixed {
    int level = 0;
    double cost = 0.0;
};

// min over grid levels of the total cost; ties go to the smallest level
inline BestFixed best_fixed_cost(std::span<const int> demands, const ActionGrid& grid,
                                 const CostParams& p)
{
    if (demands.empty())
        throw std::invalid_argument("best_fixed_cost: empty demand sequence");
    BestFixed best{grid.level(0), std::numeric_limits<double>::infinity()};
    for (int k = 0; k < grid.size(); ++k) {
        double total = 0.0;
        for (int d : demands) total += newsvendor_cost(grid.level(k), d, p);
        if (total < best.cost) best = {grid.level(k), total};
    }
    return best;
}

// Incremental prefix version of best_fixed_cost: O(N) per period.
class FixedBenchmarkTracker {
public:
    FixedBenchmarkTracker(const ActionGrid& grid, const CostParams& p)
        : grid_(&grid), params_(p), cum_(static_cast<std::size_t>(grid.size()), 0.0)
    {
    }

    void advance(int demand)
    {
        for (int k = 0; k < grid_->size(); ++k)
            cum_[static_cast<std::size_t>(k)] += newsvendor_cost(grid_->level(k), demand, params_);
    }

    double best_cost() const
    {
        double best = cum_[0];
        for (double c : cum_) best = std::min(best, c);
        return best;
    }

private:
    const ActionGrid* grid_;
    CostParams params_;
    std::vector<double> cum_;
};

// Prefix optimum over sequences with at most S switches, by dynamic
// programming over (level, switches used). Per period the transition is
//   V(i,s) = c(i,d_t) + min( V(i,s), min_{j != i} V(j,s-1) )
// using best/second-best minima of each s-row, O(N*S) per period.
class SwitchingBenchmarkTracker {
public:
    SwitchingBenchmarkTracker(const ActionGrid& grid, const CostParams& p, int switches)
        : grid_(&grid), params_(p), switches_(switches)
    {
        if (switches < 0)
            throw std::invalid_argument("switch budget must be >= 0");
        v_.assign(static_cast<std::size_t>(switches_ + 1) * static_cast<std::size_t>(grid.size()), 0.0);
    }

    void advance(int demand)
    {
        const int n = grid_->size();
        if (t_ == 0) {
            // first period: any starting level, no switch spent
            for (int s = 0; s <= switches_; ++s)
                for (int k = 0; k < n; ++k)
                    at(s, k) = newsvendor_cost(grid_->level(k), demand, params_);
            t_ = 1;
            return;
        }
        // best and runner-up of each previous s-row
        std::vector<double> best1(static_cast<std::size_t>(switches_) + 1,
                                  std::numeric_limits<double>::infinity());
        std::vector<double> best2 = best1;
        std::vector<int> arg1(static_cast<std::size_t>(switches_) + 1, -1);
        for (int s = 0; s <= switches_; ++s)
            for (int k = 0; k < n; ++k) {
                const double v = at(s, k);
                if (v < best1[static_cast<std::size_t>(s)]) {
                    best2[static_cast<std::size_t>(s)] = best1[static_cast<std::size_t>(s)];
                    best1[static_cast<std::size_t>(s)] = v;
                    arg1[static_cast<std::size_t>(s)] = k;
                } else if (v < best2[static_cast<std::size_t>(s)]) {
                    best2[static_cast<std::size_t>(s)] = v;
                }
            }
        for (int s = switches_; s >= 0; --s)
            for (int k = 0; k < n; ++k) {
                double stay = at(s, k);
                if (s > 0) {
                    const double jump = (arg1[static_cast<std::size_t>(s - 1)] == k)
                                            ? best2[static_cast<std::size_t>(s - 1)]
                                            : best1[static_cast<std::size_t>(s - 1)];
                    stay = std::min(stay, jump);
                }
                at(s, k) = newsvendor_cost(grid_->level(k), demand, params_) + stay;
            }
        ++t_;
    }

    double best_cost() const
    {
        if (t_ == 0) return 0.0;
        double best = std::numeric_limits<double>::infinity();
        for (int k = 0; k < grid_->size(); ++k)
            best = std::min(best, at(switches_, k));
        return best;
    }

private:
    double& at(int s, int k)
    {
        return v_[static_cast<std::size_t>(s) * static_cast<std::size_t>(grid_->size()) +
                  static_cast<std::size_t>(k)];
    }
    double at(int s, int k) const
    {
        return v_[static_cast<std::size_t>(s) * static_cast<std::size_t>(grid_->size()) +
                  static_cast<std::size_t>(k)];
    }

    const ActionGrid* grid_;
    CostParams params_;
    int switches_;
    long t_ = 0;
    std::vector<double> v_;
};

inline double best_switching_cost(std::span<const int> demands, const ActionGrid& grid,
                                  const CostParams& p, int switches)
{
    if (demands.empty())
        throw std::invalid_argument("best_switching_cost: empty demand sequence");
    if (switches >= static_cast<int>(demands.size()))
        switches = static_cast<int>(demands.size()) - 1;
    SwitchingBenchmarkTracker dp(grid, p, switches);
    for (int d : demands) dp.advance(d);
    return dp.best_cost();
}

// ---------------------------------------------------------------------------
// Metrics and Monte Carlo aggregation.
// ---------------------------------------------------------------------------

enum class Metric { regret, cumulative_cost, expected_regret };

struct BenchmarkSpec {
    enum class Kind { fixed, switching };
    Kind kind = Kind::fixed;
    int switches = 0;
};

// Per-period metric curve of one run. Regret at t is the cumulative cost
// minus the benchmark recomputed exactly on the demand prefix of length t.
inline std::vector<double> metric_curve(const RunRecord& rec, Metric metric,
                                        const BenchmarkSpec& bench, const ActionGrid& grid,
                                        const CostParams& p)
{
    if (metric == Metric::cumulative_cost) return rec.cum_costs;
    const std::vector<double>& cum =
        (metric == Metric::expected_regret && !rec.cum_expected_costs.empty())
            ? rec.cum_expected_costs
            : rec.cum_costs;
    std::vector<double> out(cum.size());
    if (bench.kind == BenchmarkSpec::Kind::fixed) {
        FixedBenchmarkTracker tracker(grid, p);
        for (std::size_t k = 0; k < cum.size(); ++k) {
            tracker.advance(rec.demands[k]);
            out[k] = cum[k] - tracker.best_cost();
        }
    } else {
        SwitchingBenchmarkTracker tracker(grid, p, bench.switches);
        for (std::size_t k = 0; k < cum.size(); ++k) {
            tracker.advance(rec.demands[k]);
            out[k] = cum[k] - tracker.best_cost();
        }
    }
    return out;
}

struct RegretTrace {
    std::vector<double> mean;
    std::vector<double> stddev;  // population std across runs
    int runs = 0;
};

inline RegretTrace aggregate_curves(const std::vector<std::vector<double>>& curves)
{
    if (curves.empty())
        throw std::invalid_argument("aggregate: no runs");
    const std::size_t horizon = curves.front().size();
    for (const auto& c : curves)
        if (c.size() != horizon)
            throw std::invalid_argument("aggregate: mismatched horizons");
    RegretTrace trace;
    trace.runs = static_cast<int>(curves.size());
    trace.mean.assign(horizon, 0.0);
    trace.stddev.assign(horizon, 0.0);
    for (const auto& c : curves)
        for (std::size_t t = 0; t < horizon; ++t) trace.mean[t] += c[t];
    for (auto& m : trace.mean) m /= static_cast<double>(curves.size());
    for (const auto& c : curves)
        for (std::size_t t = 0; t < horizon; ++t) {
            const double d = c[t] - trace.mean[t];
            trace.stddev[t] += d * d;
        }
    for (auto& s : trace.stddev) s = std::sqrt(s / static_cast<double>(curves.size()));
    return trace;
}

// ---------------------------------------------------------------------------
// Monte Carlo driver: runs are independent; run r of every policy shares one
// demand stream by default (common random numbers). Results are reduced in
// run-index order, so output is independent of the worker count.
// ---------------------------------------------------------------------------

struct SampledRow {
    int run;
    long period;
    int level;
    int demand;
    double cost;
    double cum_cost;
};

struct PolicyOutcome {
    std::string name;
    RegretTrace trace;
    std::vector<SampledRow> rows;  // downsampled per-run rows, run-major order
};

struct MonteCarloConfig {
    long horizon = 1000;
    int runs = 1;
    std::uint64_t base_seed = 1;
    DemandSpec demand;
    Metric metric = Metric::regret;
    BenchmarkSpec benchmark;
    InfoMode provided = InfoMode::full;
    bool shared_demand_streams = true;
    long downsample = 0;  // 0: max(1, horizon/1000)
    int workers = 0;      // 0: hardware concurrency
};

namespace detail {
inline constexpr std::uint64_t kDemandTag = 0x64656d616e640000ULL;
inline constexpr std::uint64_t kPolicyTag = 0x706f6c6963790000ULL;

template <typename Fn>
void parallel_for(int count, int workers, Fn&& fn)
{
    if (workers <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    const int n_threads = std::min(workers, count);
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int w = 0; w < n_threads; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= count || failed.load()) break;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    failed.store(true);
                }
            }
        });
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}
}  // namespace detail

inline int resolve_workers(int requested)
{
    if (requested > 0) return requested;
    if (const char* env = std::getenv("NEWSVENDOR_WORKERS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

inline std::uint64_t demand_seed(const MonteCarloConfig& cfg, int policy_index, int run)
{
    const std::uint64_t stream = cfg.shared_demand_streams ? 0 : static_cast<std::uint64_t>(policy_index + 1);
    return derive_seed(cfg.base_seed, {detail::kDemandTag, stream, static_cast<std::uint64_t>(run)});
}

inline std::uint64_t policy_seed(const MonteCarloConfig& cfg, int policy_index, int run)
{
    return derive_seed(cfg.base_seed,
                       {detail::kPolicyTag, static_cast<std::uint64_t>(policy_index),
                        static_cast<std::uint64_t>(run)});
}

inline PolicyOutcome monte_carlo(const MonteCarloConfig& cfg, int policy_index,
                                 const std::string& policy_name, const PolicyFactory& factory,
                                 const ActionGrid& grid, const CostParams& params)
{
    if (cfg.runs < 1) throw std::invalid_argument("need at least one run");
    if (cfg.horizon < 1) throw std::invalid_argument("horizon must be >= 1");
    const long stride = cfg.downsample > 0 ? cfg.downsample : std::max<long>(1, cfg.horizon / 1000);
    const int workers = resolve_workers(cfg.workers);

    std::vector<std::vector<double>> curves(static_cast<std::size_t>(cfg.runs));
    std::vector<std::vector<SampledRow>> rows(static_cast<std::size_t>(cfg.runs));

    detail::parallel_for(cfg.runs, workers, [&](int run) {
        const auto demands =
            generate_demands(cfg.demand, cfg.horizon, demand_seed(cfg, policy_index, run),
                             params.max_demand);
        auto policy = factory();
        const RunRecord rec = run_once(*policy, demands, grid, params, cfg.provided,
                                       policy_seed(cfg, policy_index, run));
        curves[static_cast<std::size_t>(run)] =
            metric_curve(rec, cfg.metric, cfg.benchmark, grid, params);
        auto& sampled = rows[static_cast<std::size_t>(run)];
        for (long t = stride; t <= cfg.horizon; t += stride) {
            const std::size_t k = static_cast<std::size_t>(t - 1);
            sampled.push_back({run, t, rec.levels[k], rec.demands[k], rec.costs[k],
                               rec.cum_costs[k]});
        }
        if (cfg.horizon % stride != 0) {
            const std::size_t k = static_cast<std::size_t>(cfg.horizon - 1);
            sampled.push_back({run, cfg.horizon, rec.levels[k], rec.demands[k], rec.costs[k],
                               rec.cum_costs[k]});
        }
    });

    PolicyOutcome out;
    out.name = policy_name;
    out.trace = aggregate_curves(curves);
    for (auto& r : rows)
        out.rows.insert(out.rows.end(), r.begin(), r.end());
    return out;
}

}  // namespace newsvendor
