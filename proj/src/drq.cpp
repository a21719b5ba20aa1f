#include "drqlab/drq.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace drqlab {

namespace {

constexpr double kZ1Floor = 1e-12;

void check_rate(const RateFunction& r, const char* name) {
    if (!(r.coef > 0.0) || !(r.exponent > 0.0))
        throw std::invalid_argument(std::string("StepSchedule: ") + name +
                                    " rate needs positive coefficient and exponent");
}

bool should_record(std::uint64_t step, std::uint64_t total, std::uint64_t every) {
    return step == total || (every > 0 && step % every == 0);
}

}  // namespace

double RateFunction::operator()(double one_minus_gamma, std::uint64_t t) const {
    if (t == 0) return 1.0;
    return 1.0 / (1.0 + coef * one_minus_gamma * std::pow(static_cast<double>(t), exponent));
}

StepSchedule::StepSchedule(double gamma, RateFunction z, RateFunction eta, RateFunction q)
    : gamma_(gamma), z_(z), eta_(eta), q_(q) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("StepSchedule: gamma outside (0, 1)");
    check_rate(z_, "z");
    check_rate(eta_, "eta");
    check_rate(q_, "Q");
    if (!(z_.exponent < eta_.exponent && eta_.exponent < q_.exponent))
        throw std::invalid_argument(
            "StepSchedule: exponents must satisfy z < eta < Q (Q is the slowest iterate)");
}

StepSchedule StepSchedule::standard(double gamma) {
    return StepSchedule(gamma, {1.0, 0.6}, {0.1, 0.8}, {0.05, 1.0});
}

StepSchedule StepSchedule::option(double gamma) {
    return StepSchedule(gamma, {1.0, 0.6}, {0.1, 0.8}, {0.01, 1.0});
}

Stepsizes StepSchedule::at(std::uint64_t t) const {
    const double omg = 1.0 - gamma_;
    return {z_(omg, t), eta_(omg, t), q_(omg, t)};
}

Stepsizes stepsizes(const StepSchedule& schedule, std::uint64_t t) { return schedule.at(t); }

void drq_update_entry(LearnerState& state, std::size_t s, std::size_t a, double r, double y,
                      const CressieReadParams& params, double gamma, const Stepsizes& rates) {
    const double ks = params.k_star();
    const double c = params.c_k();
    const double q_max = 1.0 / (1.0 - gamma);
    const double eta_max = params.eta_ceiling(q_max);

    double& z1 = state.z1(s, a);
    double& z2 = state.z2(s, a);
    double& eta = state.eta(s, a);
    double& q = state.q(s, a);

    const double shortfall = std::max(eta - y, 0.0);
    double high = 0.0;
    double low = 0.0;
    if (shortfall > 0.0) {
        if (ks == 2.0) {
            high = shortfall * shortfall;
            low = shortfall;
        } else {
            low = std::pow(shortfall, ks - 1.0);
            high = low * shortfall;
        }
    }
    z1 = (1.0 - rates.z_rate) * z1 + rates.z_rate * high;
    z2 = (1.0 - rates.z_rate) * z2 + rates.z_rate * low;

    const double z1_root = ks == 2.0 ? std::sqrt(z1) : std::pow(z1, 1.0 / ks);
    const double gradient = z1 <= kZ1Floor ? 1.0 : 1.0 - c * (z1_root / z1) * z2;
    eta = std::clamp(eta + rates.eta_rate * gradient, 0.0, eta_max);

    const double target = r - gamma * (c * z1_root - eta);
    q = std::clamp((1.0 - rates.q_rate) * q + rates.q_rate * target, 0.0, q_max);
}

void drq_update(LearnerState& state, const TransitionSample& sample, const DrqConfig& config,
                std::uint64_t t) {
    const double y = state.q.state_value(sample.s_next.index);
    drq_update_entry(state, sample.s.index, sample.a.index, sample.r, y, config.params,
                     config.schedule.gamma(), config.schedule.at(t));
    ++state.visits[sample.s.index * state.q.num_actions() + sample.a.index];
    ++state.step;
}

std::pair<LearnerState, TrainingCurve> train_single_trajectory(const TabularMdp& mdp,
                                                               const DrqConfig& config,
                                                               std::uint64_t total_steps,
                                                               RngStream& rng,
                                                               std::uint64_t curve_every) {
    if (config.schedule.gamma() != mdp.discount())
        throw std::invalid_argument("train_single_trajectory: schedule gamma differs from MDP discount");
    LearnerState state(mdp.num_states(), mdp.num_actions());
    TrainingCurve curve;
    const std::size_t s0 = mdp.start_state();
    const std::size_t A = mdp.num_actions();

    pin_terminal_values(mdp, state.q);
    StateId s = sample_initial_state(mdp, rng);
    for (std::uint64_t n = 1; n <= total_steps; ++n) {
        while (mdp.is_terminal(s.index)) s = sample_initial_state(mdp, rng);
        const ActionId a = epsilon_greedy(state.q, s, config.exploration_eps, rng);
        const TransitionSample sample = sample_transition(mdp, s, a, rng);
        const std::uint64_t clock = state.visits[s.index * A + a.index] + 1;
        drq_update(state, sample, config, clock);
        s = sample.s_next;
        if (should_record(n, total_steps, curve_every)) curve.record(n, state.q.state_value(s0), n);
    }
    return {std::move(state), std::move(curve)};
}

std::pair<LearnerState, TrainingCurve> train_synchronous(const TabularMdp& mdp,
                                                         const DrqConfig& config,
                                                         std::uint64_t total_steps, RngStream& rng,
                                                         std::uint64_t curve_every) {
    if (config.schedule.gamma() != mdp.discount())
        throw std::invalid_argument("train_synchronous: schedule gamma differs from MDP discount");
    LearnerState state(mdp.num_states(), mdp.num_actions());
    TrainingCurve curve;
    const std::size_t S = mdp.num_states();
    const std::size_t A = mdp.num_actions();
    const std::size_t s0 = mdp.start_state();
    const double gamma = mdp.discount();

    pin_terminal_values(mdp, state.q);
    const std::uint64_t per_step = (S - mdp.terminal_states().size()) * A;
    for (std::uint64_t n = 1; n <= total_steps; ++n) {
        const std::vector<double> v = state.q.state_values();
        const Stepsizes rates = config.schedule.at(n);
        for (std::size_t s = 0; s < S; ++s) {
            if (mdp.is_terminal(s)) continue;
            for (std::size_t a = 0; a < A; ++a) {
                const TransitionSample sample = sample_transition(mdp, StateId{s}, ActionId{a}, rng);
                drq_update_entry(state, s, a, sample.r, v[sample.s_next.index], config.params, gamma,
                                 rates);
                ++state.visits[s * A + a];
            }
        }
        ++state.step;
        if (should_record(n, total_steps, curve_every))
            curve.record(n, state.q.state_value(s0), n * per_step);
    }
    return {std::move(state), std::move(curve)};
}

}  // namespace drqlab
