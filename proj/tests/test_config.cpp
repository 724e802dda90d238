#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "newsvendor/config.hpp"
#include "newsvendor/experiment.hpp"

using namespace newsvendor;

namespace {

const char* kTinyConfig = R"(
# comment
[experiment]
horizon = 50
runs = 4
seed = 9
metric = regret
benchmark = fixed
information = full
downsample = 1

[costs]
overage = 1
underage = 2
max-demand = 6

[grid]
levels = 0..4,6

[demand]
kind = iid-binomial
trials = 6
q = 0.5

[policy.ewf]
type = ewf

[policy.greedy-full]
type = greedy-full
)";

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag)
    {
        path = std::filesystem::temp_directory_path() / ("newsvendor_test_" + tag);
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
};

}  // namespace

TEST_CASE("ini parsing")
{
    const auto doc = parse_ini("[a]\nx = 1\ny=  two words \n; comment\n[b]\nz=3\n");
    REQUIRE(doc.sections.size() == 2);
    CHECK(doc.sections[0].first == "a");
    CHECK(doc.sections[0].second[1].second == "two words");
    CHECK_THROWS_AS(parse_ini("x = 1\n"), ConfigError);       // key outside section
    CHECK_THROWS_AS(parse_ini("[a\nx=1\n"), ConfigError);     // unterminated header
    CHECK_THROWS_AS(parse_ini("[a]\nnot a pair\n"), ConfigError);
}

TEST_CASE("level list parsing")
{
    CHECK(parse_level_list("1..4") == std::vector<int>{1, 2, 3, 4});
    CHECK(parse_level_list("0,2,5") == std::vector<int>{0, 2, 5});
    CHECK(parse_level_list("0..2,5..6") == std::vector<int>{0, 1, 2, 5, 6});
    CHECK_THROWS_AS(parse_level_list("4..1"), ConfigError);
    CHECK_THROWS_AS(parse_level_list("a..b"), ConfigError);
}

TEST_CASE("config round trip")
{
    const auto cfg = parse_config_text(kTinyConfig);
    CHECK(cfg.horizon == 50);
    CHECK(cfg.runs == 4);
    CHECK(cfg.seed == 9);
    CHECK(cfg.underage == 2.0);
    CHECK(cfg.grid_levels == std::vector<int>{0, 1, 2, 3, 4, 6});
    REQUIRE(cfg.policies.size() == 2);
    CHECK(cfg.policies[0].instance == "ewf");
    CHECK_NOTHROW(validate_config(cfg));
}

TEST_CASE("config rejections")
{
    CHECK_THROWS_WITH(parse_config_text("[experiment]\nbogus = 1\n"),
                      Catch::Matchers::ContainsSubstring("unknown key"));
    CHECK_THROWS_WITH(parse_config_text("[policy.x]\ntype = nope\n"),
                      Catch::Matchers::ContainsSubstring("known types"));

    auto cfg = parse_config_text(kTinyConfig);
    cfg.runs = 0;
    CHECK_THROWS_WITH(validate_config(cfg), Catch::Matchers::ContainsSubstring("runs"));

    cfg = parse_config_text(kTinyConfig);
    cfg.information = InfoMode::censored;  // greedy-full demands full information
    CHECK_THROWS_WITH(validate_config(cfg), Catch::Matchers::ContainsSubstring("full"));

    cfg = parse_config_text(kTinyConfig);
    cfg.policies.clear();
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
}

TEST_CASE("presets parse, validate, and resolve the documented schedules")
{
    for (const std::string name : {"fig1", "fig2", "aim-demo", "combinatorial-demo"}) {
        const auto cfg = parse_config_text(preset_text(name));
        CHECK_NOTHROW(validate_config(cfg));
    }
    CHECK_THROWS_AS(preset_text("fig9"), ConfigError);

    const auto fig1 = parse_config_text(preset_text("fig1"));
    CHECK(fig1.horizon == 100000);
    CHECK(fig1.runs == 100);
    CHECK(fig1.grid_levels.size() == 30);
    const auto rp = resolve_policy(fig1.policies.front(), fig1);
    const double beta = fig1.cost_params().beta();
    CHECK(beta == 30.0);
    CHECK(rp.gamma == Catch::Approx(1.0 / (2.0 * beta * 100000.0)));
    CHECK(rp.eta == Catch::Approx(std::sqrt(std::log(30.0) / (4.0 * beta * beta * 100000.0))));

    const auto fig2 = parse_config_text(preset_text("fig2"));
    CHECK(fig2.demand.kind == DemandSpec::Kind::shifted_binomial);
    CHECK(fig2.metric == Metric::cumulative_cost);

    const auto demo = parse_config_text(preset_text("aim-demo"));
    CHECK(demo.grid_levels == std::vector<int>{0, 1, 2});
    CHECK(demo.demand.kind == DemandSpec::Kind::constant);

    const auto comb = parse_config_text(preset_text("combinatorial-demo"));
    REQUIRE(comb.chain.has_value());
    CHECK(comb.chain->retailers == 2);
    CHECK(comb.chain->replenishment == 3);
    CHECK(comb.chain->demands[0].value == 1);
    CHECK(comb.chain->demands[1].value == 2);
}

TEST_CASE("validation report mentions resolved parameters")
{
    const auto cfg = parse_config_text(preset_text("fig1"));
    const auto report = validation_report(cfg);
    CHECK(report.find("configuration OK") != std::string::npos);
    CHECK(report.find("gamma = 1.66666667e-07") != std::string::npos);  // 1/(2*30*1e5)
    CHECK(report.find("beta = 30") != std::string::npos);
}

TEST_CASE("experiment writes consistent outputs")
{
    TempDir dir("experiment");
    auto cfg = parse_config_text(kTinyConfig);
    cfg.out_dir = (dir.path / "out").string();
    run_experiment(cfg);

    for (const char* name : {"runs.csv", "trace.csv", "plot.svg", "manifest"})
        CHECK(std::filesystem::exists(dir.path / "out" / name));

    // trace mean equals the arithmetic mean of the per-run rows (downsample=1
    // keeps every period, and metric regret uses the shared demand stream)
    const std::string runs_csv = slurp(dir.path / "out" / "runs.csv");
    const std::string trace_csv = slurp(dir.path / "out" / "trace.csv");

    // parse runs.csv into cum costs per (policy, t)
    std::map<std::pair<std::string, long>, std::vector<double>> cums;
    {
        std::istringstream in(runs_csv);
        std::string line;
        std::getline(in, line);
        CHECK(line == "policy,run,t,level,demand,cost,cum_cost");
        while (std::getline(in, line)) {
            const auto parts = detail::split(line, ',');
            REQUIRE(parts.size() == 7);
            cums[{parts[0], std::stol(parts[2])}].push_back(std::stod(parts[6]));
        }
    }
    // regret needs the benchmark; instead cross-check the cumulative-cost mean
    // by re-running with the cumulative-cost metric
    auto cfg2 = cfg;
    cfg2.metric = Metric::cumulative_cost;
    cfg2.out_dir = (dir.path / "out2").string();
    run_experiment(cfg2);
    const std::string trace2 = slurp(dir.path / "out2" / "trace.csv");
    std::istringstream in(trace2);
    std::string line;
    std::getline(in, line);
    CHECK(line == "policy,t,mean,std");
    long checked = 0;
    while (std::getline(in, line)) {
        const auto parts = detail::split(line, ',');
        REQUIRE(parts.size() == 4);
        const auto key = std::make_pair(parts[0], std::stol(parts[1]));
        REQUIRE(cums.count(key) == 1);
        const auto& runs = cums[key];
        REQUIRE(runs.size() == 4);
        double mean = 0.0;
        for (double v : runs) mean += v;
        mean /= static_cast<double>(runs.size());
        CHECK(std::stod(parts[2]) == Catch::Approx(mean).margin(1e-9));
        ++checked;
    }
    CHECK(checked == 2 * 50);

    // byte-identical rerun
    auto cfg3 = cfg;
    cfg3.out_dir = (dir.path / "out3").string();
    run_experiment(cfg3);
    CHECK(slurp(dir.path / "out3" / "trace.csv") == slurp(dir.path / "out" / "trace.csv"));
    CHECK(slurp(dir.path / "out3" / "runs.csv") == slurp(dir.path / "out" / "runs.csv"));
}

TEST_CASE("chain experiment writes outputs")
{
    TempDir dir("chain");
    auto cfg = parse_config_text(preset_text("combinatorial-demo"));
    cfg.horizon = 300;
    cfg.runs = 3;
    cfg.downsample = 50;
    cfg.out_dir = (dir.path / "out").string();
    run_experiment(cfg);
    const std::string runs_csv = slurp(dir.path / "out" / "runs.csv");
    CHECK(runs_csv.find("1|") != std::string::npos);  // allocations serialized as a|b
    const std::string manifest = slurp(dir.path / "out" / "manifest");
    CHECK(manifest.find("[chain]") != std::string::npos);
    CHECK(manifest.find("gamma = ") != std::string::npos);
}
