#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "newsvendor/arena.hpp"
#include "newsvendor/chain.hpp"
#include "newsvendor/config.hpp"
#include "newsvendor/svg.hpp"

// Experiment execution: resolves the configuration, runs the Monte Carlo
// loops, and writes runs.csv, trace.csv, plot.svg, and a manifest echoing
// every resolved parameter. Identical config + seed give byte-identical
// CSVs regardless of the worker count.

namespace newsvendor {

// 9 significant digits; enough to reproduce doubles at plot scale without
// bloating the files
inline std::string format9(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

namespace detail {

inline std::string join_levels(const std::vector<int>& levels)
{
    std::string out;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(levels[i]);
    }
    return out;
}

inline std::string demand_manifest(const DemandSpec& d)
{
    std::ostringstream ss;
    switch (d.kind) {
        case DemandSpec::Kind::iid_binomial:
            ss << "kind = iid-binomial\ntrials = " << d.trials << "\nq = " << format9(d.q);
            break;
        case DemandSpec::Kind::shifted_binomial:
            ss << "kind = shifted-binomial\ntrials = " << d.trials << "\nq = " << format9(d.q)
               << "\nq-low = " << format9(d.q_low);
            break;
        case DemandSpec::Kind::constant:
            ss << "kind = constant\nvalue = " << d.value;
            break;
        case DemandSpec::Kind::scripted:
            ss << "kind = scripted\npath = " << d.path;
            break;
    }
    ss << "\n";
    return ss.str();
}

inline const char* metric_name(Metric m)
{
    switch (m) {
        case Metric::regret: return "regret";
        case Metric::cumulative_cost: return "cumulative-cost";
        case Metric::expected_regret: return "expected-regret";
    }
    return "?";
}

inline std::string benchmark_name(const BenchmarkSpec& b)
{
    if (b.kind == BenchmarkSpec::Kind::fixed) return "fixed";
    return "switching:" + std::to_string(b.switches);
}

// thin the trace for plotting; CSVs keep full resolution
inline PlotSeries make_series(const std::string& label, const RegretTrace& trace)
{
    PlotSeries s;
    s.label = label;
    const std::size_t horizon = trace.mean.size();
    const std::size_t stride = std::max<std::size_t>(1, horizon / 1200);
    for (std::size_t t = 0; t < horizon; t += stride) {
        s.x.push_back(static_cast<double>(t + 1));
        s.y.push_back(trace.mean[t]);
        s.band_lo.push_back(trace.mean[t] - trace.stddev[t]);
        s.band_hi.push_back(trace.mean[t] + trace.stddev[t]);
    }
    if ((horizon - 1) % stride != 0) {
        s.x.push_back(static_cast<double>(horizon));
        s.y.push_back(trace.mean[horizon - 1]);
        s.band_lo.push_back(trace.mean[horizon - 1] - trace.stddev[horizon - 1]);
        s.band_hi.push_back(trace.mean[horizon - 1] + trace.stddev[horizon - 1]);
    }
    return s;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Chain-mode Monte Carlo.
// ---------------------------------------------------------------------------

struct ChainSampledRow {
    int run;
    long period;
    std::string allocation;  // '|'-joined levels
    std::string demand;      // '|'-joined demands
    double cost;
    double cum_cost;
};

struct ChainOutcome {
    std::string name;
    RegretTrace trace;
    std::vector<ChainSampledRow> rows;
    int allocation_count = 0;
};

inline ChainOutcome run_chain_monte_carlo(const ExperimentConfig& cfg)
{
    const ChainParams chain = make_chain_params(cfg);
    const ResolvedChainPolicy rp = resolve_chain_policy(cfg.policies.front(), cfg);
    if (cfg.metric == Metric::expected_regret)
        throw ConfigError("chain experiments support metric regret or cumulative-cost");
    const long stride = cfg.downsample > 0 ? cfg.downsample : std::max<long>(1, cfg.horizon / 1000);
    const int workers = resolve_workers(cfg.workers);
    const int K = chain.retailer_count();

    std::vector<std::vector<double>> curves(static_cast<std::size_t>(cfg.runs));
    std::vector<std::vector<ChainSampledRow>> rows(static_cast<std::size_t>(cfg.runs));
    int allocation_count = 0;
    {
        AllocationSpace probe(chain, cfg.chain->cap);
        allocation_count = probe.size();
    }

    detail::parallel_for(cfg.runs, workers, [&](int run) {
        std::vector<std::vector<int>> demands(static_cast<std::size_t>(K));
        for (int k = 0; k < K; ++k)
            demands[static_cast<std::size_t>(k)] = generate_demands(
                cfg.chain->demands[static_cast<std::size_t>(k)], cfg.horizon,
                derive_seed(cfg.seed, {detail::kDemandTag, static_cast<std::uint64_t>(k + 1),
                                       static_cast<std::uint64_t>(run)}),
                cfg.max_demand);
        CombinatorialEwfPolicy policy(chain, rp.gamma, rp.eta, cfg.chain->cap);
        const ChainRunRecord rec = run_chain_once(
            policy, demands,
            derive_seed(cfg.seed, {detail::kPolicyTag, 0, static_cast<std::uint64_t>(run)}));

        auto& curve = curves[static_cast<std::size_t>(run)];
        curve.resize(rec.cum_costs.size());
        for (std::size_t t = 0; t < curve.size(); ++t)
            curve[t] = (cfg.metric == Metric::cumulative_cost)
                           ? rec.cum_costs[t]
                           : rec.cum_costs[t] - rec.best_fixed_prefix[t];

        auto emit = [&](long t) {
            const std::size_t k = static_cast<std::size_t>(t - 1);
            std::string alloc, dem;
            for (int j = 0; j < K; ++j) {
                if (j) {
                    alloc += "|";
                    dem += "|";
                }
                alloc += std::to_string(rec.allocations[k][static_cast<std::size_t>(j)]);
                dem += std::to_string(demands[static_cast<std::size_t>(j)][k]);
            }
            rows[static_cast<std::size_t>(run)].push_back(
                {run, t, alloc, dem, rec.costs[k], rec.cum_costs[k]});
        };
        for (long t = stride; t <= cfg.horizon; t += stride) emit(t);
        if (cfg.horizon % stride != 0) emit(cfg.horizon);
    });

    ChainOutcome out;
    out.name = cfg.policies.front().instance;
    out.trace = aggregate_curves(curves);
    out.allocation_count = allocation_count;
    for (auto& r : rows) out.rows.insert(out.rows.end(), r.begin(), r.end());
    return out;
}

// ---------------------------------------------------------------------------
// Manifest.
// ---------------------------------------------------------------------------

inline std::string manifest_text(const ExperimentConfig& cfg)
{
    std::ostringstream out;
    const long stride = cfg.downsample > 0 ? cfg.downsample : std::max<long>(1, cfg.horizon / 1000);
    out << "[experiment]\n";
    if (!cfg.preset_name.empty()) out << "preset = " << cfg.preset_name << "\n";
    out << "horizon = " << cfg.horizon << "\n"
        << "runs = " << cfg.runs << "\n"
        << "seed = " << cfg.seed << "\n"
        << "metric = " << detail::metric_name(cfg.metric) << "\n"
        << "benchmark = " << detail::benchmark_name(cfg.benchmark) << "\n"
        << "information = " << to_string(cfg.information) << "\n"
        << "shared-demand = " << (cfg.shared_demand ? "true" : "false") << "\n"
        << "downsample = " << stride << "\n"
        << "out = " << cfg.out_dir << "\n";
    out << "\n[costs]\noverage = " << format9(cfg.overage)
        << "\nunderage = " << format9(cfg.underage) << "\nmax-demand = " << cfg.max_demand
        << "\nbeta = " << format9(cfg.cost_params().beta()) << "\n";
    out << "\n[grid]\nlevels = " << detail::join_levels(cfg.grid_levels) << "\n";
    if (!cfg.chain) out << "\n[demand]\n" << detail::demand_manifest(cfg.demand);

    if (cfg.chain) {
        const ChainConfig& ch = *cfg.chain;
        out << "\n[chain]\nretailers = " << ch.retailers
            << "\nreplenishment = " << ch.replenishment
            << "\nwarehouse-fixed = " << format9(ch.warehouse_fixed)
            << "\nwarehouse-overage = " << format9(ch.warehouse_overage) << "\nfixed = ";
        for (std::size_t i = 0; i < ch.fixed_order.size(); ++i)
            out << (i ? "," : "") << format9(ch.fixed_order[i]);
        out << "\noverage = ";
        for (std::size_t i = 0; i < ch.overage.size(); ++i)
            out << (i ? "," : "") << format9(ch.overage[i]);
        out << "\nunderage = ";
        for (std::size_t i = 0; i < ch.underage.size(); ++i)
            out << (i ? "," : "") << format9(ch.underage[i]);
        out << "\npull = " << (ch.pull ? "true" : "false") << "\n";
        const ChainParams chain = make_chain_params(cfg);
        out << "fill = " << chain.exploration_fill() << "\n"
            << "beta = " << format9(chain.beta()) << "\n"
            << "max-fixed = " << format9(chain.max_fixed()) << "\n";
        for (int k = 1; k <= ch.retailers; ++k)
            out << "\n[demand." << k << "]\n"
                << detail::demand_manifest(ch.demands[static_cast<std::size_t>(k - 1)]);
        for (const auto& pc : cfg.policies) {
            const auto rp = resolve_chain_policy(pc, cfg);
            out << "\n[policy." << pc.instance << "]\ntype = " << pc.type
                << "\ngamma = " << format9(rp.gamma) << "\neta = " << format9(rp.eta) << "\n";
        }
        return out.str();
    }

    for (const auto& pc : cfg.policies) {
        const auto rp = resolve_policy(pc, cfg);
        out << "\n[policy." << pc.instance << "]\ntype = " << pc.type << "\n";
        if (pc.type == "ewf" || pc.type == "ewf-full" || pc.type == "fsf") {
            out << "params = " << pc.params << "\n"
                << "S = " << pc.switch_budget << "\n"
                << "gamma = " << format9(rp.gamma) << "\neta = " << format9(rp.eta) << "\n";
            if (pc.type == "fsf") out << "alpha = " << format9(rp.alpha) << "\n";
        } else if (pc.type == "aim" || pc.type == "aim-full") {
            out << "step-scale = " << format9(rp.step_scale)
                << "\nstart-point = " << format9(rp.start_point) << "\n";
        } else if (pc.type == "aee") {
            out << "phase-base = " << format9(pc.phase_base) << "\nphase-len = " << pc.phase_len
                << "\naggregate = " << (pc.pooled ? "pooled" : "latest") << "\n";
        } else if (pc.type == "fixed") {
            out << "level = " << *pc.level << "\n";
        }
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Full experiment: run everything, write the four output files.
// ---------------------------------------------------------------------------

inline void run_experiment(const ExperimentConfig& cfg)
{
    validate_config(cfg);
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);

    std::ofstream runs_csv(fs::path(cfg.out_dir) / "runs.csv", std::ios::binary);
    std::ofstream trace_csv(fs::path(cfg.out_dir) / "trace.csv", std::ios::binary);
    if (!runs_csv || !trace_csv)
        throw std::runtime_error("cannot write into output directory " + cfg.out_dir);
    runs_csv << "policy,run,t,level,demand,cost,cum_cost\n";
    trace_csv << "policy,t,mean,std\n";

    std::vector<PlotSeries> series;

    if (cfg.chain) {
        ChainOutcome outcome = run_chain_monte_carlo(cfg);
        for (const auto& row : outcome.rows)
            runs_csv << outcome.name << "," << row.run << "," << row.period << ","
                     << row.allocation << "," << row.demand << "," << format9(row.cost) << ","
                     << format9(row.cum_cost) << "\n";
        for (std::size_t t = 0; t < outcome.trace.mean.size(); ++t)
            trace_csv << outcome.name << "," << (t + 1) << "," << format9(outcome.trace.mean[t])
                      << "," << format9(outcome.trace.stddev[t]) << "\n";
        series.push_back(detail::make_series(outcome.name, outcome.trace));
    } else {
        const CostParams params = cfg.cost_params();
        const ActionGrid grid = cfg.grid();
        MonteCarloConfig mc;
        mc.horizon = cfg.horizon;
        mc.runs = cfg.runs;
        mc.base_seed = cfg.seed;
        mc.demand = cfg.demand;
        mc.metric = cfg.metric;
        mc.benchmark = cfg.benchmark;
        mc.provided = cfg.information;
        mc.shared_demand_streams = cfg.shared_demand;
        mc.downsample = cfg.downsample;
        mc.workers = cfg.workers;

        for (std::size_t pi = 0; pi < cfg.policies.size(); ++pi) {
            const auto rp = resolve_policy(cfg.policies[pi], cfg);
            PolicyOutcome outcome = monte_carlo(mc, static_cast<int>(pi),
                                                cfg.policies[pi].instance, rp.factory, grid, params);
            for (const auto& row : outcome.rows)
                runs_csv << outcome.name << "," << row.run << "," << row.period << ","
                         << row.level << "," << row.demand << "," << format9(row.cost) << ","
                         << format9(row.cum_cost) << "\n";
            for (std::size_t t = 0; t < outcome.trace.mean.size(); ++t)
                trace_csv << outcome.name << "," << (t + 1) << ","
                          << format9(outcome.trace.mean[t]) << ","
                          << format9(outcome.trace.stddev[t]) << "\n";
            series.push_back(detail::make_series(outcome.name, outcome.trace));
        }
    }

    const std::string title =
        cfg.preset_name.empty() ? std::string("experiment") : cfg.preset_name;
    write_svg_plot((fs::path(cfg.out_dir) / "plot.svg").string(),
                   title + " (" + std::to_string(cfg.runs) + " runs)", "period",
                   detail::metric_name(cfg.metric), series);

    std::ofstream manifest(fs::path(cfg.out_dir) / "manifest", std::ios::binary);
    manifest << manifest_text(cfg);
}

// Dry-run report: resolved parameters plus crude resource estimates.
inline std::string validation_report(const ExperimentConfig& cfg)
{
    validate_config(cfg);
    std::ostringstream out;
    out << "configuration OK\n\n" << manifest_text(cfg) << "\n";
    const double curve_bytes = 8.0 * static_cast<double>(cfg.horizon) * cfg.runs;
    out << "estimated peak curve memory: " << format9(curve_bytes / (1024.0 * 1024.0))
        << " MiB per policy\n";
    const double rounds = static_cast<double>(cfg.horizon) * cfg.runs *
                          static_cast<double>(cfg.policies.size());
    const double level_ops = rounds * static_cast<double>(cfg.grid_levels.size());
    out << "estimated work: " << format9(rounds) << " policy rounds, ~"
        << format9(level_ops / 5e7) << " s single-threaded at 50M level-ops/s\n";
    out << "workers: " << resolve_workers(cfg.workers) << "\n";
    return out.str();
}

}  // namespace newsvendor
