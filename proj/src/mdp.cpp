#include "drqlab/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "drqlab/kernels.hpp"

namespace drqlab {

namespace {

constexpr double kSumTolerance = 1e-12;

void check_probability_vector(std::span<const double> p, const std::string& what) {
    double sum = 0.0;
    for (double x : p) {
        if (!(x >= 0.0)) throw std::invalid_argument(what + ": negative or NaN probability");
        sum += x;
    }
    if (std::abs(sum - 1.0) > kSumTolerance)
        throw std::invalid_argument(what + ": probabilities sum to " + std::to_string(sum));
}

std::vector<double> cumulative(std::span<const double> p) {
    std::vector<double> cdf(p.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) cdf[i] = (acc += p[i]);
    return cdf;
}

// First index whose cumulative mass exceeds u; rounding at the top end
// falls back to the last index with positive mass.
std::size_t inverse_cdf(std::span<const double> cdf, std::span<const double> mass, double u) {
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    std::size_t i = static_cast<std::size_t>(it - cdf.begin());
    if (i >= cdf.size()) i = cdf.size() - 1;
    while (mass[i] == 0.0 && i > 0) --i;
    return i;
}

}  // namespace

TabularMdp::TabularMdp(std::size_t num_states, std::size_t num_actions, std::vector<Row> rows,
                       double discount, std::vector<double> initial_distribution,
                       std::vector<std::size_t> terminal_states, RewardScale scale)
    : num_states_(num_states),
      num_actions_(num_actions),
      rows_(std::move(rows)),
      discount_(discount),
      initial_(std::move(initial_distribution)),
      terminal_(num_states, 0),
      scale_(scale) {
    if (num_states == 0 || num_actions == 0)
        throw std::invalid_argument("TabularMdp: empty state or action space");
    if (rows_.size() != num_states * num_actions)
        throw std::invalid_argument("TabularMdp: expected one row per (state, action)");
    if (!(discount > 0.0 && discount < 1.0))
        throw std::invalid_argument("TabularMdp: discount must lie in (0, 1)");
    if (initial_.size() != num_states)
        throw std::invalid_argument("TabularMdp: initial distribution has wrong length");
    check_probability_vector(initial_, "initial distribution");
    if (!(scale_.scale > 0.0)) throw std::invalid_argument("TabularMdp: reward scale must be positive");

    cdf_.reserve(rows_.size());
    expected_reward_.reserve(rows_.size());
    std::vector<double> probs;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        Row& row = rows_[i];
        const std::string where = "row (" + std::to_string(i / num_actions) + ", " +
                                  std::to_string(i % num_actions) + ")";
        if (row.empty()) throw std::invalid_argument(where + ": no successors");
        std::stable_sort(row.begin(), row.end(),
                         [](const Successor& a, const Successor& b) { return a.state < b.state; });
        probs.clear();
        double mean_reward = 0.0;
        for (std::size_t j = 0; j < row.size(); ++j) {
            const Successor& succ = row[j];
            if (succ.state >= num_states) throw std::invalid_argument(where + ": successor out of range");
            if (!(succ.reward >= 0.0 && succ.reward <= 1.0))
                throw std::invalid_argument(where + ": reward outside [0, 1]");
            probs.push_back(succ.prob);
            mean_reward += succ.prob * succ.reward;
        }
        check_probability_vector(probs, where);
        cdf_.push_back(cumulative(probs));
        expected_reward_.push_back(mean_reward);
    }

    for (std::size_t t : terminal_states) {
        if (t >= num_states) throw std::invalid_argument("TabularMdp: terminal state out of range");
        terminal_[t] = 1;
        for (std::size_t a = 0; a < num_actions; ++a) {
            const Row& row = rows_[t * num_actions + a];
            bool self_loop = false;
            for (const Successor& succ : row)
                if (succ.state == t && succ.prob == 1.0) self_loop = true;
            if (!self_loop)
                throw std::invalid_argument("TabularMdp: terminal state " + std::to_string(t) +
                                            " must self-loop with probability 1");
        }
    }

    initial_cdf_ = cumulative(initial_);
    start_state_ = static_cast<std::size_t>(
        std::max_element(initial_.begin(), initial_.end()) - initial_.begin());
}

TabularMdp TabularMdp::from_dense(std::size_t num_states, std::size_t num_actions,
                                  const std::vector<std::vector<double>>& dense_rows,
                                  const std::vector<double>& rewards, double discount,
                                  std::vector<double> initial_distribution,
                                  std::vector<std::size_t> terminal_states, RewardScale scale) {
    if (dense_rows.size() != num_states * num_actions || rewards.size() != dense_rows.size())
        throw std::invalid_argument("TabularMdp::from_dense: shape mismatch");
    std::vector<Row> rows(dense_rows.size());
    for (std::size_t i = 0; i < dense_rows.size(); ++i) {
        if (dense_rows[i].size() != num_states)
            throw std::invalid_argument("TabularMdp::from_dense: row length mismatch");
        for (std::size_t s = 0; s < num_states; ++s) {
            const double p = dense_rows[i][s];
            if (p != 0.0) rows[i].push_back({s, p, rewards[i]});
        }
        if (rows[i].empty()) rows[i].push_back({0, 0.0, rewards[i]});  // rejected below
    }
    return TabularMdp(num_states, num_actions, std::move(rows), discount,
                      std::move(initial_distribution), std::move(terminal_states), scale);
}

std::vector<double> TabularMdp::dense_row(std::size_t s, std::size_t a) const {
    std::vector<double> row(num_states_, 0.0);
    for (const Successor& succ : successors(s, a)) row[succ.state] += succ.prob;
    return row;
}

void TabularMdp::set_start_state(std::size_t s) {
    if (s >= num_states_ || !(initial_[s] > 0.0))
        throw std::invalid_argument("TabularMdp: start state must have positive initial probability");
    start_state_ = s;
}

std::vector<std::size_t> TabularMdp::terminal_states() const {
    std::vector<std::size_t> out;
    for (std::size_t s = 0; s < num_states_; ++s)
        if (terminal_[s]) out.push_back(s);
    return out;
}

double QTable::state_value(std::size_t s) const {
    const auto r = row(s);
    return *std::max_element(r.begin(), r.end());
}

std::vector<double> QTable::state_values() const {
    std::vector<double> out(num_states_);
    kernels::row_max(values_, num_actions_, out);
    return out;
}

TransitionSample sample_transition(const TabularMdp& mdp, StateId s, ActionId a, RngStream& rng) {
    if (s.index >= mdp.num_states() || a.index >= mdp.num_actions())
        throw std::invalid_argument("sample_transition: state or action out of range");
    const std::size_t row_index = s.index * mdp.num_actions() + a.index;
    const auto& row = mdp.rows_[row_index];
    const auto& cdf = mdp.cdf_[row_index];
    const double u = rng.uniform();
    std::size_t j;
    if (row.size() == 1) {
        j = 0;
    } else {
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        j = static_cast<std::size_t>(it - cdf.begin());
        if (j >= row.size()) j = row.size() - 1;
        while (row[j].prob == 0.0 && j > 0) --j;
    }
    return {s, a, row[j].reward, StateId{row[j].state}};
}

StateId sample_initial_state(const TabularMdp& mdp, RngStream& rng) {
    return StateId{inverse_cdf(mdp.initial_cdf_, mdp.initial_, rng.uniform())};
}

ActionId greedy_action(const QTable& q, StateId s) {
    if (s.index >= q.num_states()) throw std::invalid_argument("greedy_action: state out of range");
    const auto r = q.row(s.index);
    return ActionId{static_cast<std::size_t>(std::max_element(r.begin(), r.end()) - r.begin())};
}

void pin_terminal_values(const TabularMdp& mdp, QTable& q) {
    for (std::size_t t : mdp.terminal_states())
        for (std::size_t a = 0; a < mdp.num_actions(); ++a)
            q(t, a) = mdp.expected_reward(t, a) / (1.0 - mdp.discount());
}

ActionId epsilon_greedy(const QTable& q, StateId s, double eps, RngStream& rng) {
    if (!(eps >= 0.0 && eps <= 1.0)) throw std::invalid_argument("epsilon_greedy: eps outside [0, 1]");
    if (rng.uniform() < eps) return ActionId{rng.uniform_index(q.num_actions())};
    return greedy_action(q, s);
}

RolloutResult rollout(const TabularMdp& mdp, const QTable& q, double eps, std::size_t max_steps,
                      RngStream& rng) {
    if (max_steps == 0) throw std::invalid_argument("rollout: max_steps must be >= 1");
    RolloutResult out;
    StateId s = sample_initial_state(mdp, rng);
    double discount = 1.0;
    while (!mdp.is_terminal(s.index) && out.length < max_steps) {
        const ActionId a = epsilon_greedy(q, s, eps, rng);
        const TransitionSample step = sample_transition(mdp, s, a, rng);
        const double raw = mdp.reward_scale().to_raw(step.r);
        out.discounted_return += discount * raw;
        out.undiscounted_return += raw;
        discount *= mdp.discount();
        ++out.length;
        s = step.s_next;
    }
    return out;
}

}  // namespace drqlab
