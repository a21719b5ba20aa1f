#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "drqlab/rng.hpp"

namespace drqlab {

struct StateId {
    std::size_t index = 0;
    friend bool operator==(StateId, StateId) = default;
};

struct ActionId {
    std::size_t index = 0;
    friend bool operator==(ActionId, ActionId) = default;
};

/// One outcome of a transition row. The reward belongs to the outcome so
/// that environments rewarding "entering a cell" stay representable; a row
/// may list the same next state twice with different rewards.
struct Successor {
    std::size_t state = 0;
    double prob = 0.0;
    double reward = 0.0;
};

/// Affine map from model reward units back to the environment's raw units:
/// raw = scale * r + offset.
struct RewardScale {
    double scale = 1.0;
    double offset = 0.0;

    double to_raw(double r) const { return scale * r + offset; }
    double from_raw(double raw) const { return (raw - offset) / scale; }
};

struct TransitionSample {
    StateId s;
    ActionId a;
    double r = 0.0;
    StateId s_next;
};

/// Finite discounted MDP with sparse transition rows.
///
/// Invariants checked on construction: every row is a probability vector
/// (non-negative, sums to 1 within 1e-12), outcome rewards lie in [0, 1],
/// the discount is in (0, 1), and terminal states self-loop with
/// probability one under every action.
class TabularMdp {
public:
    using Row = std::vector<Successor>;

    TabularMdp(std::size_t num_states, std::size_t num_actions, std::vector<Row> rows,
               double discount, std::vector<double> initial_distribution,
               std::vector<std::size_t> terminal_states = {}, RewardScale scale = {});

    /// Convenience for models whose reward depends only on (s, a).
    /// `dense_rows[s * A + a]` is a full-length probability vector.
    static TabularMdp from_dense(std::size_t num_states, std::size_t num_actions,
                                 const std::vector<std::vector<double>>& dense_rows,
                                 const std::vector<double>& rewards, double discount,
                                 std::vector<double> initial_distribution,
                                 std::vector<std::size_t> terminal_states = {},
                                 RewardScale scale = {});

    std::size_t num_states() const { return num_states_; }
    std::size_t num_actions() const { return num_actions_; }
    std::size_t num_pairs() const { return num_states_ * num_actions_; }
    double discount() const { return discount_; }
    /// Upper bound on any discounted value: 1 / (1 - discount).
    double value_bound() const { return 1.0 / (1.0 - discount_); }

    std::span<const Successor> successors(std::size_t s, std::size_t a) const {
        return rows_[s * num_actions_ + a];
    }
    /// Nominal expected reward sum_s' P(s'|s,a) R(s,a,s').
    double expected_reward(std::size_t s, std::size_t a) const {
        return expected_reward_[s * num_actions_ + a];
    }
    /// Full-length transition probability vector (zeros included).
    std::vector<double> dense_row(std::size_t s, std::size_t a) const;

    const std::vector<double>& initial_distribution() const { return initial_; }
    /// Reference start state s0 for value curves: argmax of the initial
    /// distribution, lowest index on ties, unless overridden.
    std::size_t start_state() const { return start_state_; }
    /// Overrides s0; the state must have positive initial probability.
    void set_start_state(std::size_t s);
    bool is_terminal(std::size_t s) const { return terminal_[s] != 0; }
    std::vector<std::size_t> terminal_states() const;
    const RewardScale& reward_scale() const { return scale_; }

private:
    std::size_t num_states_;
    std::size_t num_actions_;
    std::vector<Row> rows_;
    std::vector<std::vector<double>> cdf_;
    std::vector<double> expected_reward_;
    double discount_;
    std::vector<double> initial_;
    std::vector<double> initial_cdf_;
    std::vector<unsigned char> terminal_;
    std::size_t start_state_ = 0;
    RewardScale scale_;

    friend TransitionSample sample_transition(const TabularMdp&, StateId, ActionId, RngStream&);
    friend StateId sample_initial_state(const TabularMdp&, RngStream&);
};

/// Row-major num_states x num_actions table of action values.
class QTable {
public:
    QTable() = default;
    QTable(std::size_t num_states, std::size_t num_actions, double fill = 0.0)
        : num_states_(num_states), num_actions_(num_actions),
          values_(num_states * num_actions, fill) {}

    std::size_t num_states() const { return num_states_; }
    std::size_t num_actions() const { return num_actions_; }

    double& operator()(std::size_t s, std::size_t a) { return values_[s * num_actions_ + a]; }
    double operator()(std::size_t s, std::size_t a) const { return values_[s * num_actions_ + a]; }

    std::span<const double> row(std::size_t s) const {
        return {values_.data() + s * num_actions_, num_actions_};
    }
    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    double state_value(std::size_t s) const;
    /// max_a Q(s, a) for every state, via the active kernel backend.
    std::vector<double> state_values() const;

    friend bool operator==(const QTable&, const QTable&) = default;

private:
    std::size_t num_states_ = 0;
    std::size_t num_actions_ = 0;
    std::vector<double> values_;
};

/// Episodic "done" handling for learners: sets every action value of each
/// terminal state to its absorbing value r_T / (1 - discount), which the
/// robust operator leaves unchanged (a one-point row has no ambiguity).
/// Learners never update terminal rows afterwards.
void pin_terminal_values(const TabularMdp& mdp, QTable& q);

/// Draws s' by inverse CDF over the row using one uniform variate.
TransitionSample sample_transition(const TabularMdp& mdp, StateId s, ActionId a, RngStream& rng);

/// Draws a start state from the initial distribution (one variate).
StateId sample_initial_state(const TabularMdp& mdp, RngStream& rng);

/// argmax_a Q(s, a); ties go to the lowest action index.
ActionId greedy_action(const QTable& q, StateId s);

/// One variate decides explore/exploit; a second is drawn only when exploring.
ActionId epsilon_greedy(const QTable& q, StateId s, double eps, RngStream& rng);

struct RolloutResult {
    double discounted_return = 0.0;
    double undiscounted_return = 0.0;
    std::size_t length = 0;
};

/// Episode from a start state drawn from the initial distribution until a
/// terminal state is entered or max_steps transitions have been taken.
/// Returns are reported in raw reward units (the model's RewardScale).
RolloutResult rollout(const TabularMdp& mdp, const QTable& q, double eps, std::size_t max_steps,
                      RngStream& rng);

}  // namespace drqlab
