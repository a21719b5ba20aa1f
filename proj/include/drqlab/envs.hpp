#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "drqlab/mdp.hpp"

namespace drqlab {

/// 4 x 4 wind-perturbed grid. Cells are (row, col) -> row * 4 + col; state
/// 16 is the absorbing terminal. Actions: 0 up, 1 down, 2 left, 3 right.
struct CliffGrid {
    static constexpr std::size_t height = 4;
    static constexpr std::size_t width = 4;
    static constexpr std::size_t num_states = height * width + 1;
    static constexpr std::size_t num_actions = 4;
    static constexpr std::size_t terminal = height * width;
    static constexpr std::size_t start_row = 2, start_col = 0;
    static constexpr std::size_t goal_row = 2, goal_col = 3;
    static constexpr std::size_t water_row = 3;
    static constexpr double goal_reward = 5.0;
    static constexpr double water_reward = -1.0;
    static constexpr double step_reward = 0.0;
    static constexpr double discount = 0.9;
    /// Raw rewards span [-1, 5]; model reward r' = (r + 1) / 6.
    static constexpr RewardScale scale{6.0, -1.0};

    static constexpr std::size_t cell(std::size_t row, std::size_t col) { return row * width + col; }
};

/// With probability 1 - wind_p the intended move is executed, otherwise a
/// uniformly random direction (of all four). Off-grid moves stay in place.
/// Entering the goal (+5) or the water row (-1) ends the episode.
TabularMdp build_cliffwalking(double wind_p);

/// American put on a 0.1-tick price grid over [80, 140].
struct OptionSpec {
    static constexpr double strike = 100.0;
    static constexpr double up = 1.02;
    static constexpr double down = 0.98;
    static constexpr double min_price = 80.0;
    static constexpr double max_price = 140.0;
    static constexpr double tick = 0.1;
    static constexpr std::size_t num_prices = 601;
    static constexpr std::size_t num_states = num_prices + 1;
    static constexpr std::size_t exit_state = num_prices;
    static constexpr std::size_t num_actions = 2;  // 0 hold, 1 exercise
    static constexpr double discount = 0.95;
    static constexpr std::size_t horizon = 5;
    static constexpr double init_half_width = 5.0;
    /// Raw payoff max(0, K - s) lies in [0, 20]; model reward r' = payoff / 20.
    static constexpr RewardScale scale{20.0, 0.0};

    static double price(std::size_t state) { return min_price + tick * static_cast<double>(state); }
    /// Nearest tick, halves rounded up, clamped to the grid.
    static std::size_t state_of(double price);
};

/// Price moves to up*s with probability p0, else down*s; exercising pays
/// max(0, K - s) and moves to the absorbing exit state.
TabularMdp build_option(double p0);

struct RandomMdpSpec {
    std::size_t num_states = 5;
    std::size_t num_actions = 2;
    double discount = 0.9;
    double concentration = 1.0;  // symmetric Dirichlet parameter per row
    std::uint64_t seed = 0;
};

/// Dirichlet transition rows, uniform rewards in [0, 1], uniform initial
/// distribution, no terminal states. Deterministic in the seed.
TabularMdp random_mdp(const RandomMdpSpec& spec);

/// Environment addressable by key from the harness.
struct EnvironmentInfo {
    std::string key;
    double nominal_param = 0.0;
    std::vector<double> perturbations;
    std::size_t eval_max_steps = 100;
};

/// "cliffwalking" (param = wind probability), "american_put" (param = up
/// probability) or "random" (param unused; see RandomMdpSpec).
TabularMdp build_environment(const std::string& key, double param, const RandomMdpSpec& random = {});
EnvironmentInfo environment_info(const std::string& key);

}  // namespace drqlab
