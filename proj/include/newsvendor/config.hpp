#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "newsvendor/arena.hpp"
#include "newsvendor/chain.hpp"
#include "newsvendor/demand.hpp"
#include "newsvendor/policies.hpp"
#include "newsvendor/tuning.hpp"

// Experiment configuration: a flat INI-style text format ([section] headers,
// key = value lines, '#' or ';' comments) plus the built-in presets. Parsing
// is strict: unknown sections, unknown keys, and malformed values are
// configuration errors.

namespace newsvendor {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// INI subset.
// ---------------------------------------------------------------------------

struct IniDocument {
    // section -> ordered key/value pairs; section order preserved
    std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>> sections;

    const std::vector<std::pair<std::string, std::string>>* find(const std::string& name) const
    {
        for (const auto& [sec, kv] : sections)
            if (sec == name) return &kv;
        return nullptr;
    }
};

inline std::string trim(const std::string& s)
{
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline IniDocument parse_ini(const std::string& text)
{
    IniDocument doc;
    std::istringstream in(text);
    std::string line;
    std::string section;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError("line " + std::to_string(lineno) + ": empty section name");
            doc.sections.emplace_back(section, std::vector<std::pair<std::string, std::string>>{});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        if (section.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": key outside any [section]");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        doc.sections.back().second.emplace_back(std::move(key), std::move(value));
    }
    return doc;
}

// ---------------------------------------------------------------------------
// Typed value helpers.
// ---------------------------------------------------------------------------

namespace detail {

inline long parse_long(const std::string& v, const std::string& what)
{
    try {
        std::size_t pos = 0;
        const long out = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw ConfigError(what + ": '" + v + "' is not an integer");
    }
}

inline double parse_double(const std::string& v, const std::string& what)
{
    try {
        std::size_t pos = 0;
        const double out = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw ConfigError(what + ": '" + v + "' is not a number");
    }
}

inline std::uint64_t parse_u64(const std::string& v, const std::string& what)
{
    try {
        std::size_t pos = 0;
        const unsigned long long out = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return static_cast<std::uint64_t>(out);
    } catch (const std::exception&) {
        throw ConfigError(what + ": '" + v + "' is not an unsigned integer");
    }
}

inline bool parse_bool(const std::string& v, const std::string& what)
{
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(what + ": '" + v + "' is not a boolean");
}

inline std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(trim(cur));
    return out;
}

}  // namespace detail

// "0..4,7,10..12" -> {0,1,2,3,4,7,10,11,12}
inline std::vector<int> parse_level_list(const std::string& text)
{
    std::vector<int> out;
    for (const auto& atom : detail::split(text, ',')) {
        if (atom.empty()) throw ConfigError("grid levels: empty entry");
        const auto dots = atom.find("..");
        if (dots == std::string::npos) {
            out.push_back(static_cast<int>(detail::parse_long(atom, "grid level")));
        } else {
            const long lo = detail::parse_long(trim(atom.substr(0, dots)), "grid range start");
            const long hi = detail::parse_long(trim(atom.substr(dots + 2)), "grid range end");
            if (hi < lo) throw ConfigError("grid range " + atom + " is decreasing");
            for (long v = lo; v <= hi; ++v) out.push_back(static_cast<int>(v));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Experiment configuration.
// ---------------------------------------------------------------------------

struct PolicyConfig {
    std::string instance;  // label used in CSV/plots
    std::string type;
    std::string params = "experiment";  // experiment | theorem1 | theorem2 | theorem3 | explicit
    std::optional<double> eta;
    std::optional<double> gamma;
    std::optional<double> alpha;
    int switch_budget = 1;  // S entering the eta schedules
    std::optional<double> step_scale;   // aim
    std::optional<double> start_point;  // aim
    double phase_base = 2.718281828459045;  // aee
    int phase_len = 1;
    bool pooled = true;
    std::optional<int> level;  // fixed
};

inline const std::vector<std::string>& known_policy_types()
{
    static const std::vector<std::string> names = {
        "ewf", "ewf-full", "fsf", "aee", "greedy-full",
        "aim", "aim-full", "fixed", "combinatorial-ewf"};
    return names;
}

struct ChainConfig {
    int retailers = 0;
    int replenishment = 0;
    double warehouse_fixed = 0.0;
    double warehouse_overage = 0.0;
    std::vector<double> fixed_order;  // per retailer
    std::vector<double> overage;
    std::vector<double> underage;
    bool pull = false;
    std::optional<int> fill;
    std::size_t cap = std::size_t{1} << 20;
    std::vector<DemandSpec> demands;  // per retailer
};

struct ExperimentConfig {
    long horizon = 1000;
    int runs = 10;
    std::uint64_t seed = 1;
    Metric metric = Metric::regret;
    BenchmarkSpec benchmark;
    InfoMode information = InfoMode::full;
    bool shared_demand = true;
    long downsample = 0;
    int workers = 0;
    std::string out_dir = "out";
    std::string preset_name;  // informational

    double overage = 1.0;
    double underage = 1.0;
    int max_demand = 30;
    std::vector<int> grid_levels;

    DemandSpec demand;
    std::vector<PolicyConfig> policies;

    std::optional<ChainConfig> chain;

    CostParams cost_params() const { return CostParams(overage, underage, max_demand); }
    ActionGrid grid() const { return ActionGrid(grid_levels, max_demand); }
};

// ---------------------------------------------------------------------------
// INI -> ExperimentConfig.
// ---------------------------------------------------------------------------

namespace detail {

inline DemandSpec parse_demand_section(const std::vector<std::pair<std::string, std::string>>& kv,
                                       const std::string& where)
{
    DemandSpec spec;
    bool kind_seen = false;
    for (const auto& [key, value] : kv) {
        if (key == "kind") {
            kind_seen = true;
            if (value == "iid-binomial") spec.kind = DemandSpec::Kind::iid_binomial;
            else if (value == "shifted-binomial") spec.kind = DemandSpec::Kind::shifted_binomial;
            else if (value == "constant") spec.kind = DemandSpec::Kind::constant;
            else if (value == "scripted") spec.kind = DemandSpec::Kind::scripted;
            else throw ConfigError(where + ": unknown demand kind '" + value + "'");
        } else if (key == "trials") {
            spec.trials = static_cast<int>(parse_long(value, where + ".trials"));
        } else if (key == "q") {
            spec.q = parse_double(value, where + ".q");
        } else if (key == "q-low") {
            spec.q_low = parse_double(value, where + ".q-low");
        } else if (key == "value") {
            spec.value = static_cast<int>(parse_long(value, where + ".value"));
        } else if (key == "path") {
            spec.path = value;
        } else {
            throw ConfigError(where + ": unknown key '" + key + "'");
        }
    }
    if (!kind_seen)
        throw ConfigError(where + ": missing 'kind'");
    if (spec.kind == DemandSpec::Kind::scripted && spec.path.empty())
        throw ConfigError(where + ": scripted demand needs 'path'");
    if (spec.q < 0.0 || spec.q > 1.0 || spec.q_low < 0.0 || spec.q_low > 1.0)
        throw ConfigError(where + ": probabilities must lie in [0,1]");
    return spec;
}

inline PolicyConfig parse_policy_section(const std::string& instance,
                                         const std::vector<std::pair<std::string, std::string>>& kv)
{
    PolicyConfig pc;
    pc.instance = instance;
    const std::string where = "policy." + instance;
    for (const auto& [key, value] : kv) {
        if (key == "type") {
            pc.type = value;
        } else if (key == "params") {
            if (value != "experiment" && value != "theorem1" && value != "theorem2" &&
                value != "theorem3" && value != "explicit")
                throw ConfigError(where + ": unknown params schedule '" + value + "'");
            pc.params = value;
        } else if (key == "eta") {
            pc.eta = parse_double(value, where + ".eta");
        } else if (key == "gamma") {
            pc.gamma = parse_double(value, where + ".gamma");
        } else if (key == "alpha") {
            pc.alpha = parse_double(value, where + ".alpha");
        } else if (key == "S") {
            pc.switch_budget = static_cast<int>(parse_long(value, where + ".S"));
        } else if (key == "step-scale") {
            pc.step_scale = parse_double(value, where + ".step-scale");
        } else if (key == "start-point") {
            pc.start_point = parse_double(value, where + ".start-point");
        } else if (key == "phase-base") {
            pc.phase_base = parse_double(value, where + ".phase-base");
        } else if (key == "phase-len") {
            pc.phase_len = static_cast<int>(parse_long(value, where + ".phase-len"));
        } else if (key == "aggregate") {
            if (value == "latest") pc.pooled = false;
            else if (value == "pooled") pc.pooled = true;
            else throw ConfigError(where + ": aggregate must be 'latest' or 'pooled'");
        } else if (key == "level") {
            pc.level = static_cast<int>(parse_long(value, where + ".level"));
        } else {
            throw ConfigError(where + ": unknown key '" + key + "'");
        }
    }
    if (pc.type.empty())
        throw ConfigError(where + ": missing 'type'");
    bool known = false;
    for (const auto& n : known_policy_types()) known = known || (n == pc.type);
    if (!known) {
        std::string names;
        for (const auto& n : known_policy_types()) names += (names.empty() ? "" : ", ") + n;
        throw ConfigError(where + ": unknown policy type '" + pc.type + "'; known types: " + names);
    }
    return pc;
}

}  // namespace detail

inline ExperimentConfig config_from_ini(const IniDocument& doc)
{
    ExperimentConfig cfg;
    std::vector<std::pair<int, DemandSpec>> retailer_demands;
    bool grid_seen = false;

    for (const auto& [section, kv] : doc.sections) {
        if (section == "experiment") {
            for (const auto& [key, value] : kv) {
                if (key == "horizon") cfg.horizon = detail::parse_long(value, "experiment.horizon");
                else if (key == "runs") cfg.runs = static_cast<int>(detail::parse_long(value, "experiment.runs"));
                else if (key == "seed") cfg.seed = detail::parse_u64(value, "experiment.seed");
                else if (key == "metric") {
                    if (value == "regret") cfg.metric = Metric::regret;
                    else if (value == "cumulative-cost") cfg.metric = Metric::cumulative_cost;
                    else if (value == "expected-regret") cfg.metric = Metric::expected_regret;
                    else throw ConfigError("experiment.metric: unknown metric '" + value + "'");
                } else if (key == "benchmark") {
                    if (value == "fixed") cfg.benchmark = {BenchmarkSpec::Kind::fixed, 0};
                    else if (value.rfind("switching:", 0) == 0)
                        cfg.benchmark = {BenchmarkSpec::Kind::switching,
                                         static_cast<int>(detail::parse_long(value.substr(10),
                                                                             "benchmark switches"))};
                    else throw ConfigError("experiment.benchmark: expected 'fixed' or 'switching:S'");
                } else if (key == "information") {
                    if (value == "censored") cfg.information = InfoMode::censored;
                    else if (value == "partially-censored") cfg.information = InfoMode::partially_censored;
                    else if (value == "full") cfg.information = InfoMode::full;
                    else throw ConfigError("experiment.information: unknown mode '" + value + "'");
                } else if (key == "shared-demand") {
                    cfg.shared_demand = detail::parse_bool(value, "experiment.shared-demand");
                } else if (key == "downsample") {
                    cfg.downsample = detail::parse_long(value, "experiment.downsample");
                } else if (key == "workers") {
                    cfg.workers = static_cast<int>(detail::parse_long(value, "experiment.workers"));
                } else if (key == "out") {
                    cfg.out_dir = value;
                } else {
                    throw ConfigError("experiment: unknown key '" + key + "'");
                }
            }
        } else if (section == "costs") {
            for (const auto& [key, value] : kv) {
                if (key == "overage") cfg.overage = detail::parse_double(value, "costs.overage");
                else if (key == "underage") cfg.underage = detail::parse_double(value, "costs.underage");
                else if (key == "max-demand")
                    cfg.max_demand = static_cast<int>(detail::parse_long(value, "costs.max-demand"));
                else throw ConfigError("costs: unknown key '" + key + "'");
            }
        } else if (section == "grid") {
            for (const auto& [key, value] : kv) {
                if (key == "levels") {
                    cfg.grid_levels = parse_level_list(value);
                    grid_seen = true;
                } else {
                    throw ConfigError("grid: unknown key '" + key + "'");
                }
            }
        } else if (section == "demand") {
            cfg.demand = detail::parse_demand_section(kv, "demand");
        } else if (section.rfind("demand.", 0) == 0) {
            const int idx = static_cast<int>(detail::parse_long(section.substr(7), "retailer demand index"));
            retailer_demands.emplace_back(idx, detail::parse_demand_section(kv, section));
        } else if (section.rfind("policy.", 0) == 0) {
            cfg.policies.push_back(detail::parse_policy_section(section.substr(7), kv));
        } else if (section == "chain") {
            ChainConfig ch;
            for (const auto& [key, value] : kv) {
                if (key == "retailers")
                    ch.retailers = static_cast<int>(detail::parse_long(value, "chain.retailers"));
                else if (key == "replenishment")
                    ch.replenishment = static_cast<int>(detail::parse_long(value, "chain.replenishment"));
                else if (key == "warehouse-fixed")
                    ch.warehouse_fixed = detail::parse_double(value, "chain.warehouse-fixed");
                else if (key == "warehouse-overage")
                    ch.warehouse_overage = detail::parse_double(value, "chain.warehouse-overage");
                else if (key == "fixed") {
                    ch.fixed_order.clear();
                    for (const auto& a : detail::split(value, ','))
                        ch.fixed_order.push_back(detail::parse_double(a, "chain.fixed"));
                } else if (key == "overage") {
                    ch.overage.clear();
                    for (const auto& a : detail::split(value, ','))
                        ch.overage.push_back(detail::parse_double(a, "chain.overage"));
                } else if (key == "underage") {
                    ch.underage.clear();
                    for (const auto& a : detail::split(value, ','))
                        ch.underage.push_back(detail::parse_double(a, "chain.underage"));
                } else if (key == "pull") {
                    ch.pull = detail::parse_bool(value, "chain.pull");
                } else if (key == "fill") {
                    ch.fill = static_cast<int>(detail::parse_long(value, "chain.fill"));
                } else if (key == "cap") {
                    ch.cap = static_cast<std::size_t>(detail::parse_long(value, "chain.cap"));
                } else {
                    throw ConfigError("chain: unknown key '" + key + "'");
                }
            }
            cfg.chain = std::move(ch);
        } else {
            throw ConfigError("unknown section [" + section + "]");
        }
    }

    if (!grid_seen) {
        cfg.grid_levels.resize(static_cast<std::size_t>(cfg.max_demand) + 1);
        for (int i = 0; i <= cfg.max_demand; ++i)
            cfg.grid_levels[static_cast<std::size_t>(i)] = i;
    }

    if (cfg.chain) {
        auto broadcast = [&](std::vector<double>& v, double fallback, const char* what) {
            if (v.empty()) v.assign(static_cast<std::size_t>(cfg.chain->retailers), fallback);
            if (static_cast<int>(v.size()) == 1)
                v.assign(static_cast<std::size_t>(cfg.chain->retailers), v[0]);
            if (static_cast<int>(v.size()) != cfg.chain->retailers)
                throw ConfigError(std::string("chain.") + what + ": expected 1 or K values");
        };
        broadcast(cfg.chain->fixed_order, 0.0, "fixed");
        broadcast(cfg.chain->overage, cfg.overage, "overage");
        broadcast(cfg.chain->underage, cfg.underage, "underage");
        cfg.chain->demands.assign(static_cast<std::size_t>(cfg.chain->retailers), cfg.demand);
        for (const auto& [idx, spec] : retailer_demands) {
            if (idx < 1 || idx > cfg.chain->retailers)
                throw ConfigError("demand." + std::to_string(idx) + ": retailer index out of range");
            cfg.chain->demands[static_cast<std::size_t>(idx - 1)] = spec;
        }
    } else if (!retailer_demands.empty()) {
        throw ConfigError("per-retailer [demand.k] sections require a [chain] section");
    }

    return cfg;
}

inline ExperimentConfig parse_config_text(const std::string& text)
{
    return config_from_ini(parse_ini(text));
}

// ---------------------------------------------------------------------------
// Parameter resolution and policy construction.
// ---------------------------------------------------------------------------

struct ResolvedPolicy {
    PolicyConfig config;
    double eta = 0.0;
    double gamma = 0.0;
    double alpha = 0.0;       // fsf only
    double step_scale = 0.0;  // aim only
    double start_point = 0.0;
    PolicyFactory factory;
    InfoMode required = InfoMode::censored;
};

inline ResolvedPolicy resolve_policy(const PolicyConfig& pc, const ExperimentConfig& cfg)
{
    const CostParams params = cfg.cost_params();
    const ActionGrid grid = cfg.grid();
    const double beta = params.beta();
    const int n = grid.size();
    ResolvedPolicy rp;
    rp.config = pc;

    auto tuned_ewf = [&]() -> EwfTuning {
        if (pc.params == "theorem1") return theorem1_parameters(cfg.horizon, n, beta);
        if (pc.params == "theorem2") {
            const auto t2 = theorem2_parameters(cfg.horizon, n, beta, pc.switch_budget);
            return {t2.gamma, t2.eta};
        }
        const auto ex = experiment_parameters(cfg.horizon, n, beta, pc.switch_budget);
        return {ex.gamma, ex.eta};
    };

    if (pc.type == "ewf" || pc.type == "ewf-full") {
        const auto tun = tuned_ewf();
        rp.gamma = pc.gamma.value_or(tun.gamma);
        rp.eta = pc.eta.value_or(tun.eta);
        const bool full = (pc.type == "ewf-full");
        rp.required = full ? InfoMode::full : InfoMode::censored;
        rp.factory = [grid, params, g = rp.gamma, e = rp.eta, full]() {
            return std::make_unique<EwfPolicy>(grid, params, g, e, full);
        };
    } else if (pc.type == "fsf") {
        FsfTuning tun = (pc.params == "theorem2")
                            ? theorem2_parameters(cfg.horizon, n, beta, pc.switch_budget)
                            : experiment_parameters(cfg.horizon, n, beta, pc.switch_budget);
        rp.gamma = pc.gamma.value_or(tun.gamma);
        rp.eta = pc.eta.value_or(tun.eta);
        rp.alpha = pc.alpha.value_or(tun.alpha);
        rp.required = InfoMode::censored;
        rp.factory = [grid, params, g = rp.gamma, e = rp.eta, a = rp.alpha]() {
            return std::make_unique<FsfPolicy>(grid, params, g, e, a);
        };
    } else if (pc.type == "aim" || pc.type == "aim-full") {
        AimConfig ac;
        ac.step_scale = pc.step_scale.value_or(AimConfig::default_step_scale(params));
        ac.use_indicator = (pc.type == "aim-full");
        ac.start_point = pc.start_point.value_or(params.max_demand / 2.0);
        rp.step_scale = ac.step_scale;
        rp.start_point = ac.start_point;
        rp.required = ac.use_indicator ? InfoMode::partially_censored : InfoMode::censored;
        rp.factory = [params, ac]() { return std::make_unique<AimPolicy>(params, ac); };
    } else if (pc.type == "greedy-full") {
        rp.required = InfoMode::full;
        rp.factory = [grid, params]() { return std::make_unique<GreedyFullPolicy>(grid, params); };
    } else if (pc.type == "aee") {
        AeeConfig ac;
        ac.phase_base = pc.phase_base;
        ac.phase_len = pc.phase_len;
        ac.pooled = pc.pooled;
        aee_phases(ac, 1);  // validates base/len
        rp.required = InfoMode::censored;
        rp.factory = [grid, params, ac]() { return std::make_unique<AeePolicy>(grid, params, ac); };
    } else if (pc.type == "fixed") {
        if (!pc.level)
            throw ConfigError("policy." + pc.instance + ": 'fixed' needs a 'level'");
        const int lvl = *pc.level;
        if (!grid.contains(lvl))
            throw ConfigError("policy." + pc.instance + ": level " + std::to_string(lvl) +
                              " is not in the grid");
        rp.required = InfoMode::censored;
        rp.factory = [lvl, grid]() { return std::make_unique<FixedLevelPolicy>(lvl, grid); };
    } else if (pc.type == "combinatorial-ewf") {
        throw ConfigError("policy." + pc.instance +
                          ": combinatorial-ewf runs only with a [chain] section");
    } else {
        throw ConfigError("policy." + pc.instance + ": unhandled type '" + pc.type + "'");
    }

    if (!provides(cfg.information, rp.required))
        throw ConfigError("policy." + pc.instance + " needs " + to_string(rp.required) +
                          " feedback but the experiment provides " + to_string(cfg.information));
    return rp;
}

inline ChainParams make_chain_params(const ExperimentConfig& cfg)
{
    if (!cfg.chain) throw ConfigError("no [chain] section");
    const ChainConfig& ch = *cfg.chain;
    if (ch.retailers < 1) throw ConfigError("chain.retailers must be >= 1");
    std::vector<RetailerParams> rs;
    for (int k = 0; k < ch.retailers; ++k)
        rs.push_back({ch.fixed_order[static_cast<std::size_t>(k)],
                      ch.overage[static_cast<std::size_t>(k)],
                      ch.underage[static_cast<std::size_t>(k)]});
    return ChainParams(std::move(rs), ch.warehouse_fixed, ch.warehouse_overage,
                       ch.replenishment, cfg.grid(), cfg.max_demand, ch.pull, ch.fill);
}

// Resolved tuning of the combinatorial policy.
struct ResolvedChainPolicy {
    PolicyConfig config;
    double gamma = 0.0;
    double eta = 0.0;
};

inline ResolvedChainPolicy resolve_chain_policy(const PolicyConfig& pc,
                                                const ExperimentConfig& cfg)
{
    if (pc.type != "combinatorial-ewf")
        throw ConfigError("policy." + pc.instance +
                          ": chain experiments support only 'combinatorial-ewf'");
    const ChainParams chain = make_chain_params(cfg);
    const auto tun = theorem3_parameters(cfg.horizon, chain.grid().size(),
                                         chain.retailer_count(), chain.beta());
    ResolvedChainPolicy rp;
    rp.config = pc;
    rp.gamma = pc.gamma.value_or(tun.gamma);
    rp.eta = pc.eta.value_or(tun.eta);
    return rp;
}

// Basic whole-config validation; throws ConfigError with the first problem.
inline void validate_config(const ExperimentConfig& cfg)
{
    if (cfg.horizon < 1) throw ConfigError("experiment.horizon must be >= 1");
    if (cfg.runs < 1) throw ConfigError("experiment.runs must be >= 1");
    if (cfg.downsample < 0) throw ConfigError("experiment.downsample must be >= 0");
    if (cfg.benchmark.kind == BenchmarkSpec::Kind::switching &&
        (cfg.benchmark.switches < 0 || cfg.benchmark.switches >= cfg.horizon))
        throw ConfigError("benchmark switches must lie in [0, horizon)");
    cfg.cost_params();
    cfg.grid();
    if (cfg.policies.empty()) throw ConfigError("no [policy.*] sections");
    if (cfg.chain) {
        for (const auto& pc : cfg.policies) resolve_chain_policy(pc, cfg);
        make_chain_params(cfg);
        for (const auto& d : cfg.chain->demands)
            if (d.kind == DemandSpec::Kind::constant && (d.value < 0 || d.value > cfg.max_demand))
                throw ConfigError("constant demand outside [0, max-demand]");
    } else {
        std::set<std::string> seen;
        for (const auto& pc : cfg.policies) {
            if (!seen.insert(pc.instance).second)
                throw ConfigError("duplicate policy instance '" + pc.instance + "'");
            resolve_policy(pc, cfg);
        }
    }
}

// ---------------------------------------------------------------------------
// Presets.
// ---------------------------------------------------------------------------

inline std::string preset_text(const std::string& name)
{
    // The AEE entries pin the phase-based parametrization used for the
    // figure reproductions: geometric phase starts (base 8), 49-sample
    // phases, estimates from the latest phase only.
    if (name == "fig1") {
        return R"(# stationary demand study
[experiment]
horizon = 100000
runs = 100
seed = 7001
metric = regret
benchmark = fixed
information = full

[costs]
overage = 1
underage = 1
max-demand = 30

[grid]
levels = 1..30

[demand]
kind = iid-binomial
trials = 30
q = 0.5

[policy.ewf]
type = ewf
S = 1

[policy.fsf]
type = fsf
S = 3

[policy.aee]
type = aee
phase-base = 8
phase-len = 49
aggregate = latest

[policy.aim]
type = aim

[policy.ewf-full]
type = ewf-full
S = 1

[policy.greedy-full]
type = greedy-full

[policy.aim-full]
type = aim-full
)";
    }
    if (name == "fig2") {
        return R"(# nonstationary demand study: q drops to 0.1 on [T/5, T/2]
[experiment]
horizon = 100000
runs = 100
seed = 7002
metric = cumulative-cost
benchmark = fixed
information = full

[costs]
overage = 1
underage = 1
max-demand = 30

[grid]
levels = 1..30

[demand]
kind = shifted-binomial
trials = 30
q = 0.5
q-low = 0.1

[policy.ewf]
type = ewf
S = 1

[policy.fsf]
type = fsf
S = 3

[policy.aee]
type = aee
phase-base = 8
phase-len = 49
aggregate = latest

[policy.aim]
type = aim

[policy.ewf-full]
type = ewf-full
S = 1

[policy.greedy-full]
type = greedy-full

[policy.aim-full]
type = aim-full
)";
    }
    if (name == "aim-demo") {
        return R"(# gradient-descent misbehavior without the lost-sales indicator
[experiment]
horizon = 10000
runs = 100
seed = 7003
metric = regret
benchmark = fixed
information = partially-censored

[costs]
overage = 1
underage = 1
max-demand = 2

[grid]
levels = 0..2

[demand]
kind = constant
value = 1

[policy.aim]
type = aim

[policy.aim-full]
type = aim-full
)";
    }
    if (name == "combinatorial-demo") {
        return R"(# one warehouse, two retailers, constant demands
[experiment]
horizon = 10000
runs = 20
seed = 7004
metric = regret
benchmark = fixed
information = censored

[costs]
overage = 1
underage = 1
max-demand = 2

[grid]
levels = 0..2

[chain]
retailers = 2
replenishment = 3
warehouse-fixed = 1
warehouse-overage = 0.5
fixed = 0.5
overage = 1
underage = 1

[demand.1]
kind = constant
value = 1

[demand.2]
kind = constant
value = 2

[policy.combinatorial-ewf]
type = combinatorial-ewf
params = theorem3
)";
    }
    throw ConfigError("unknown preset '" + name + "'; available: fig1, fig2, aim-demo, combinatorial-demo");
}

}  // namespace newsvendor
