#pragma once

#include <cmath>
#include <stdexcept>

// Parameter schedules for the weighted forecasters. Two families:
//  - the analysis schedules (theorem1/theorem2/theorem3), whose eta carries
//    the log(2*beta*T*N^3 + N + 2) variance-control factor, and
//  - the experiment schedule eta = sqrt(S log N / (4 beta^2 T)) used by the
//    numerical studies, with S = 1 for plain exponential weighting.

namespace newsvendor {

struct EwfTuning {
    double gamma;
    double eta;
};

struct FsfTuning {
    double alpha;
    double gamma;
    double eta;
};

inline void require_tuning_inputs(long horizon, int n_actions, double beta)
{
    if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
    if (n_actions < 2) throw std::invalid_argument("need at least 2 actions");
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
}

// gamma = 1/(2 beta T), eta = sqrt(log N / (4 beta^2 T log(2 beta T N^3 + N + 2)))
inline EwfTuning theorem1_parameters(long horizon, int n_actions, double beta)
{
    require_tuning_inputs(horizon, n_actions, beta);
    const double t = static_cast<double>(horizon);
    const double n = static_cast<double>(n_actions);
    const double gamma = 1.0 / (2.0 * beta * t);
    const double logterm = std::log(2.0 * beta * t * n * n * n + n + 2.0);
    const double eta = std::sqrt(std::log(n) / (4.0 * beta * beta * t * logterm));
    return {gamma, eta};
}

// The tuning used for the numerical studies:
//   gamma = 1/(2 beta T), alpha = 1/T, eta = sqrt(S log N / (4 beta^2 T))
inline FsfTuning experiment_parameters(long horizon, int n_actions, double beta,
                                       int switch_budget = 1)
{
    require_tuning_inputs(horizon, n_actions, beta);
    if (switch_budget < 1) throw std::invalid_argument("switch budget must be >= 1");
    const double t = static_cast<double>(horizon);
    const double n = static_cast<double>(n_actions);
    const double gamma = 1.0 / (2.0 * beta * t);
    const double alpha = 1.0 / t;
    const double eta = std::sqrt(switch_budget * std::log(n) / (4.0 * beta * beta * t));
    return {alpha, gamma, eta};
}

// Tracking-regret tuning. With a known switch budget S the numerator of
// eta^2 gains a factor S; without one it is just log(NT).
inline FsfTuning theorem2_parameters(long horizon, int n_actions, double beta,
                                     int switch_budget = 0)
{
    require_tuning_inputs(horizon, n_actions, beta);
    if (switch_budget < 0) throw std::invalid_argument("switch budget must be >= 0");
    const double t = static_cast<double>(horizon);
    const double n = static_cast<double>(n_actions);
    const double alpha = 1.0 / t;
    const double gamma = 1.0 / (2.0 * beta * t);
    const double logterm = std::log(2.0 * beta * t * n * n * n + n + 2.0);
    const double s = switch_budget > 0 ? static_cast<double>(switch_budget) : 1.0;
    const double eta = std::sqrt(s * std::log(n * t) / (4.0 * beta * beta * t * logterm));
    return {alpha, gamma, eta};
}

// Combinatorial (multi-retailer) tuning:
//   gamma = 1/T, eta = sqrt(log N / (beta^2 K T log(T N K + N + 2)))
inline EwfTuning theorem3_parameters(long horizon, int n_actions, int n_retailers,
                                     double beta)
{
    require_tuning_inputs(horizon, n_actions, beta);
    if (n_retailers < 1) throw std::invalid_argument("need at least 1 retailer");
    const double t = static_cast<double>(horizon);
    const double n = static_cast<double>(n_actions);
    const double k = static_cast<double>(n_retailers);
    const double gamma = 1.0 / t;
    const double logterm = std::log(t * n * k + n + 2.0);
    const double eta = std::sqrt(std::log(n) / (beta * beta * k * t * logterm));
    return {gamma, eta};
}

}  // namespace newsvendor
