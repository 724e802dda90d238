// Minimal library walkthrough: run the exponentially weighted forecaster
// against an i.i.d. binomial demand stream and print its regret curve.

#include <iostream>

#include "newsvendor/arena.hpp"
#include "newsvendor/tuning.hpp"

int main()
{
    using namespace newsvendor;

    const long horizon = 20000;
    const CostParams params(1.0, 1.0, 30);
    const ActionGrid grid = full_grid(30);

    DemandSpec demand;
    demand.kind = DemandSpec::Kind::iid_binomial;
    demand.trials = 30;
    demand.q = 0.5;
    const auto demands = generate_demands(demand, horizon, /*seed=*/42, params.max_demand);

    const auto tuning = experiment_parameters(horizon, grid.size(), params.beta());
    EwfPolicy policy(grid, params, tuning.gamma, tuning.eta);

    const RunRecord rec = run_once(policy, demands, grid, params, InfoMode::censored, /*seed=*/1);
    const auto regret = metric_curve(rec, Metric::regret, {}, grid, params);

    const auto best = best_fixed_cost(demands, grid, params);
    std::cout << "best fixed level " << best.level << " with total cost " << best.cost << "\n";
    for (long t = horizon / 10; t <= horizon; t += horizon / 10)
        std::cout << "t=" << t << "  regret=" << regret[static_cast<std::size_t>(t - 1)] << "\n";
    return 0;
}
