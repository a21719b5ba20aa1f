#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>

#include "drqlab/cressie_read.hpp"
#include "drqlab/curve.hpp"
#include "drqlab/mdp.hpp"

// Three-timescale distributionally robust Q-learning. Per observed
// transition (s, a, r, s') with y = max_a' Q(s', a'):
//   Z1  <- (1 - z) Z1 + z (eta - y)_+^{k*}            fast
//   Z2  <- (1 - z) Z2 + z (eta - y)_+^{k*-1}
//   eta <- clip[0, eta_max](eta + e (1 - c_k Z1^{1/k*-1} Z2))   medium
//   Q   <- clip[0, M]((1 - q) Q + q (r - gamma (c_k Z1^{1/k*} - eta)))  slow
// with M = 1 / (1 - gamma) and eta_max = c_k / (c_k - 1) M.

namespace drqlab {

/// rate(t) = 1 / (1 + coef * (1 - gamma) * t^exponent).
struct RateFunction {
    double coef = 1.0;
    double exponent = 1.0;

    double operator()(double one_minus_gamma, std::uint64_t t) const;
};

struct Stepsizes {
    double z_rate = 1.0;
    double eta_rate = 1.0;
    double q_rate = 1.0;
};

/// Three stepsize sequences. Exponents must satisfy z < eta < q so that the
/// Q rate vanishes fastest (Q is the slow iterate).
class StepSchedule {
public:
    StepSchedule(double gamma, RateFunction z, RateFunction eta, RateFunction q);

    /// Constants used for the grid-world experiments:
    /// z: 1/(1+(1-g)t^0.6), eta: 1/(1+0.1(1-g)t^0.8), Q: 1/(1+0.05(1-g)t).
    static StepSchedule standard(double gamma);
    /// Same, with Q coefficient 0.01 (option-pricing experiments).
    static StepSchedule option(double gamma);

    Stepsizes at(std::uint64_t t) const;

    double gamma() const { return gamma_; }
    const RateFunction& z() const { return z_; }
    const RateFunction& eta() const { return eta_; }
    const RateFunction& q() const { return q_; }

private:
    double gamma_;
    RateFunction z_;
    RateFunction eta_;
    RateFunction q_;
};

enum class DrqMode { single_trajectory, synchronous };

struct DrqConfig {
    CressieReadParams params{2.0, 0.5};
    double exploration_eps = 0.1;
    StepSchedule schedule = StepSchedule::standard(0.9);
    DrqMode mode = DrqMode::single_trajectory;
};

/// The four coupled tables plus the global step counter.
struct LearnerState {
    QTable q;
    QTable eta;
    QTable z1;
    QTable z2;
    std::uint64_t step = 0;
    /// Per-(s, a) visit counts; the stepsize clock in single-trajectory mode.
    std::vector<std::uint64_t> visits;

    LearnerState() = default;
    LearnerState(std::size_t num_states, std::size_t num_actions)
        : q(num_states, num_actions), eta(num_states, num_actions), z1(num_states, num_actions),
          z2(num_states, num_actions), visits(num_states * num_actions, 0) {}

    friend bool operator==(const LearnerState&, const LearnerState&) = default;
};

/// Rates evaluated at clock t.
Stepsizes stepsizes(const StepSchedule& schedule, std::uint64_t t);

/// One update of entry (s, a) with explicit rates; y is max_a' Q(s', a')
/// read before this update. Values are clipped to [0, q_max] and
/// [0, eta_max].
void drq_update_entry(LearnerState& state, std::size_t s, std::size_t a, double r, double y,
                      const CressieReadParams& params, double gamma, const Stepsizes& rates);

/// Applies one transition using the rates at clock t and increments the
/// step counter. Only entry (s, a) of each table changes.
void drq_update(LearnerState& state, const TransitionSample& sample, const DrqConfig& config,
                std::uint64_t t);

/// Algorithm loop on one continuous trajectory with epsilon-greedy actions.
/// Terminal rows are pinned (pin_terminal_values); entering a terminal state
/// restarts from the initial distribution. Records max_a Q(s0, a) every
/// `curve_every` steps and at the final step.
std::pair<LearnerState, TrainingCurve> train_single_trajectory(const TabularMdp& mdp,
                                                               const DrqConfig& config,
                                                               std::uint64_t total_steps,
                                                               RngStream& rng,
                                                               std::uint64_t curve_every);

/// Generative-model variant: each step draws one next state for every
/// (s, a) and updates all entries against the Q table from the start of the
/// step, with the global step as clock. Terminal rows stay pinned.
std::pair<LearnerState, TrainingCurve> train_synchronous(const TabularMdp& mdp,
                                                         const DrqConfig& config,
                                                         std::uint64_t total_steps, RngStream& rng,
                                                         std::uint64_t curve_every);

}  // namespace drqlab
