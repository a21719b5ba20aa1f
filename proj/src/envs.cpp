#include "drqlab/envs.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace drqlab {

namespace {

void add_outcome(TabularMdp::Row& row, std::size_t state, double prob, double reward) {
    if (prob == 0.0) return;
    for (Successor& succ : row) {
        if (succ.state == state && succ.reward == reward) {
            succ.prob += prob;
            return;
        }
    }
    row.push_back({state, prob, reward});
}

}  // namespace

TabularMdp build_cliffwalking(double wind_p) {
    if (!(wind_p >= 0.0 && wind_p <= 1.0))
        throw std::invalid_argument("build_cliffwalking: wind probability outside [0, 1]");
    using G = CliffGrid;
    constexpr int dr[4] = {-1, 1, 0, 0};
    constexpr int dc[4] = {0, 0, -1, 1};
    const double alive = G::scale.from_raw(G::step_reward);
    const double goal = G::scale.from_raw(G::goal_reward);
    const double water = G::scale.from_raw(G::water_reward);

    std::vector<TabularMdp::Row> rows(G::num_states * G::num_actions);
    for (std::size_t r = 0; r < G::height; ++r) {
        for (std::size_t c = 0; c < G::width; ++c) {
            const std::size_t s = G::cell(r, c);
            const bool absorbing = (r == G::goal_row && c == G::goal_col) || r == G::water_row;
            for (std::size_t a = 0; a < G::num_actions; ++a) {
                auto& row = rows[s * G::num_actions + a];
                if (absorbing) {
                    // Goal and water cells are never occupied: entering them ends the episode.
                    row.push_back({G::terminal, 1.0, alive});
                    continue;
                }
                for (std::size_t d = 0; d < 4; ++d) {
                    const double prob = (d == a ? 1.0 - wind_p : 0.0) + wind_p / 4.0;
                    const int nr = static_cast<int>(r) + dr[d];
                    const int nc = static_cast<int>(c) + dc[d];
                    const bool inside = nr >= 0 && nr < static_cast<int>(G::height) && nc >= 0 &&
                                        nc < static_cast<int>(G::width);
                    const std::size_t tr = inside ? static_cast<std::size_t>(nr) : r;
                    const std::size_t tc = inside ? static_cast<std::size_t>(nc) : c;
                    if (tr == G::goal_row && tc == G::goal_col)
                        add_outcome(row, G::terminal, prob, goal);
                    else if (tr == G::water_row)
                        add_outcome(row, G::terminal, prob, water);
                    else
                        add_outcome(row, G::cell(tr, tc), prob, alive);
                }
            }
        }
    }
    for (std::size_t a = 0; a < G::num_actions; ++a)
        rows[G::terminal * G::num_actions + a].push_back({G::terminal, 1.0, alive});

    std::vector<double> initial(G::num_states, 0.0);
    initial[G::cell(G::start_row, G::start_col)] = 1.0;
    return TabularMdp(G::num_states, G::num_actions, std::move(rows), G::discount, std::move(initial),
                      {G::terminal}, G::scale);
}

std::size_t OptionSpec::state_of(double price) {
    // Nudge so decimal half ticks like 100.05 round up despite binary representation.
    const double ticks = std::floor((price - min_price) / tick + 0.5 + 1e-9);
    return static_cast<std::size_t>(std::clamp(ticks, 0.0, static_cast<double>(num_prices - 1)));
}

TabularMdp build_option(double p0) {
    if (!(p0 >= 0.0 && p0 <= 1.0)) throw std::invalid_argument("build_option: p0 outside [0, 1]");
    using O = OptionSpec;
    // Prices in integer ticks (tenths) so that round-half-up is exact.
    const long base_ticks = 800;
    const long max_index = static_cast<long>(O::num_prices) - 1;
    auto move = [&](std::size_t state, long factor_percent) {
        const long ticks = base_ticks + static_cast<long>(state);
        const long moved = (ticks * factor_percent + 50) / 100;
        return static_cast<std::size_t>(std::clamp(moved - base_ticks, 0L, max_index));
    };

    std::vector<TabularMdp::Row> rows(O::num_states * O::num_actions);
    for (std::size_t s = 0; s < O::num_prices; ++s) {
        auto& hold = rows[s * O::num_actions + 0];
        add_outcome(hold, move(s, 102), p0, 0.0);
        add_outcome(hold, move(s, 98), 1.0 - p0, 0.0);
        const double payoff = std::max(0.0, O::strike - O::price(s));
        rows[s * O::num_actions + 1].push_back({O::exit_state, 1.0, O::scale.from_raw(payoff)});
    }
    for (std::size_t a = 0; a < O::num_actions; ++a)
        rows[O::exit_state * O::num_actions + a].push_back({O::exit_state, 1.0, 0.0});

    std::vector<double> initial(O::num_states, 0.0);
    const std::size_t lo = O::state_of(O::strike - O::init_half_width);
    const std::size_t hi = O::state_of(O::strike + O::init_half_width);
    for (std::size_t s = lo; s <= hi; ++s) initial[s] = 1.0 / static_cast<double>(hi - lo + 1);
    // Renormalize so the vector sums to one within rounding.
    double sum = 0.0;
    for (double p : initial) sum += p;
    for (double& p : initial) p /= sum;
    TabularMdp mdp(O::num_states, O::num_actions, std::move(rows), O::discount, std::move(initial),
                   {O::exit_state}, O::scale);
    // s0 is the at-the-money price, the centre of the initial range.
    mdp.set_start_state(O::state_of(O::strike));
    return mdp;
}

TabularMdp random_mdp(const RandomMdpSpec& spec) {
    if (spec.num_states == 0 || spec.num_actions == 0)
        throw std::invalid_argument("random_mdp: empty state or action space");
    if (!(spec.concentration > 0.0)) throw std::invalid_argument("random_mdp: concentration must be > 0");
    RngStream rng(spec.seed);
    std::gamma_distribution<double> gamma(spec.concentration, 1.0);
    std::vector<TabularMdp::Row> rows(spec.num_states * spec.num_actions);
    std::vector<double> draws(spec.num_states);
    for (auto& row : rows) {
        const double reward = rng.uniform();
        double total = 0.0;
        for (double& g : draws) total += (g = gamma(rng.engine()));
        double assigned = 0.0;
        for (std::size_t s = 0; s < spec.num_states; ++s) {
            const double p = s + 1 == spec.num_states ? 1.0 - assigned : draws[s] / total;
            assigned += p;
            if (p > 0.0) row.push_back({s, p, reward});
        }
    }
    std::vector<double> initial(spec.num_states, 1.0 / static_cast<double>(spec.num_states));
    double sum = 0.0;
    for (double p : initial) sum += p;
    initial.back() += 1.0 - sum;
    return TabularMdp(spec.num_states, spec.num_actions, std::move(rows), spec.discount,
                      std::move(initial));
}

TabularMdp build_environment(const std::string& key, double param, const RandomMdpSpec& random) {
    if (key == "cliffwalking") return build_cliffwalking(param);
    if (key == "american_put") return build_option(param);
    if (key == "random") return random_mdp(random);
    throw std::invalid_argument("unknown environment '" + key + "'");
}

EnvironmentInfo environment_info(const std::string& key) {
    if (key == "cliffwalking") return {key, 0.5, {0.5, 0.6, 0.7, 0.8, 0.9}, 100};
    if (key == "american_put") return {key, 0.5, {0.3, 0.4, 0.5, 0.6, 0.7}, OptionSpec::horizon};
    if (key == "random") return {key, 0.0, {0.0}, 100};
    throw std::invalid_argument("unknown environment '" + key + "'");
}

}  // namespace drqlab
