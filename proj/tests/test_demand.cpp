#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "newsvendor/demand.hpp"

using namespace newsvendor;

namespace {

struct TempFile {
    std::filesystem::path path;
    explicit TempFile(const std::string& contents)
    {
        path = std::filesystem::temp_directory_path() /
               ("newsvendor_demand_test_" + std::to_string(::getpid()) + ".txt");
        std::ofstream out(path);
        out << contents;
    }
    ~TempFile() { std::error_code ec; std::filesystem::remove(path, ec); }
};

}  // namespace

TEST_CASE("constant generator")
{
    DemandSpec spec;
    spec.kind = DemandSpec::Kind::constant;
    spec.value = 1;
    CHECK(generate_demands(spec, 3, 0, 5) == std::vector<int>{1, 1, 1});
    spec.value = 9;
    CHECK_THROWS_AS(generate_demands(spec, 3, 0, 5), std::invalid_argument);
}

TEST_CASE("iid binomial mean at scale")
{
    DemandSpec spec;
    spec.kind = DemandSpec::Kind::iid_binomial;
    spec.trials = 30;
    spec.q = 0.5;
    const auto d = generate_demands(spec, 100000, 12345, 30);
    double mean = 0.0;
    for (int v : d) {
        mean += v;
        REQUIRE(v >= 0);
        REQUIRE(v <= 30);
    }
    mean /= static_cast<double>(d.size());
    CHECK(mean == Catch::Approx(15.0).margin(0.1));
}

TEST_CASE("shifted binomial window")
{
    CHECK(shift_window(100000) == std::pair<long, long>{20000, 50000});
    CHECK(shift_window(10) == std::pair<long, long>{2, 5});
    CHECK(shift_window(7) == std::pair<long, long>{2, 3});  // ceil(1.4), floor(3.5)

    DemandSpec spec;
    spec.kind = DemandSpec::Kind::shifted_binomial;
    spec.trials = 30;
    spec.q = 0.5;
    spec.q_low = 0.1;
    const long horizon = 50000;
    const auto d = generate_demands(spec, horizon, 777, 30);
    const auto [lo, hi] = shift_window(horizon);
    double in_mean = 0.0, out_mean = 0.0;
    long in_n = 0, out_n = 0;
    for (long t = 1; t <= horizon; ++t) {
        if (t >= lo && t <= hi) {
            in_mean += d[static_cast<std::size_t>(t - 1)];
            ++in_n;
        } else {
            out_mean += d[static_cast<std::size_t>(t - 1)];
            ++out_n;
        }
    }
    CHECK(in_mean / in_n == Catch::Approx(3.0).margin(0.15));
    CHECK(out_mean / out_n == Catch::Approx(15.0).margin(0.15));
}

TEST_CASE("scripted demands load verbatim and validate")
{
    TempFile file("3\n0\n5\n2\n");
    DemandSpec spec;
    spec.kind = DemandSpec::Kind::scripted;
    spec.path = file.path.string();
    CHECK(generate_demands(spec, 4, 0, 5) == std::vector<int>{3, 0, 5, 2});
    CHECK(generate_demands(spec, 2, 0, 5) == std::vector<int>{3, 0});
    CHECK_THROWS_AS(generate_demands(spec, 5, 0, 5), std::runtime_error);   // too short
    CHECK_THROWS_AS(generate_demands(spec, 4, 0, 4), std::runtime_error);   // 5 out of range
    spec.path = "/nonexistent/demands.txt";
    CHECK_THROWS_AS(generate_demands(spec, 4, 0, 5), std::runtime_error);
}

TEST_CASE("determinism and seed separation")
{
    DemandSpec spec;
    spec.kind = DemandSpec::Kind::iid_binomial;
    spec.trials = 20;
    spec.q = 0.3;
    const auto base = generate_demands(spec, 2000, 55, 20);
    CHECK(generate_demands(spec, 2000, 55, 20) == base);
    for (std::uint64_t s = 0; s < 10; ++s) {
        if (s == 55) continue;
        CHECK(generate_demands(spec, 2000, s, 20) != base);
    }
}

TEST_CASE("binomial histogram matches the analytic pmf")
{
    DemandSpec spec;
    spec.kind = DemandSpec::Kind::iid_binomial;
    spec.trials = 30;
    spec.q = 0.5;
    const long n = 1000000;
    const auto d = generate_demands(spec, n, 2024, 30);
    std::vector<double> hist(31, 0.0);
    for (int v : d) hist[static_cast<std::size_t>(v)] += 1.0 / static_cast<double>(n);

    // analytic pmf via the log binomial coefficient
    std::vector<double> pmf(31, 0.0);
    double total_variation = 0.0;
    for (int k = 0; k <= 30; ++k) {
        double logc = 0.0;
        for (int j = 0; j < k; ++j)
            logc += std::log(static_cast<double>(30 - j)) - std::log(static_cast<double>(j + 1));
        pmf[static_cast<std::size_t>(k)] = std::exp(logc + 30.0 * std::log(0.5));
        total_variation += std::abs(pmf[static_cast<std::size_t>(k)] - hist[static_cast<std::size_t>(k)]);
    }
    CHECK(total_variation / 2.0 < 0.01);
}
