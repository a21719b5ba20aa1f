#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <utility>

#include "drqlab/drq.hpp"
#include "drqlab/envs.hpp"
#include "drqlab/robust_dp.hpp"
#include "fixtures.hpp"

using namespace drqlab;

TEST_CASE("stepsizes") {
    const auto sched = StepSchedule::standard(0.9);
    const auto r0 = stepsizes(sched, 0);
    CHECK(r0.z_rate == 1.0);
    CHECK(r0.eta_rate == 1.0);
    CHECK(r0.q_rate == 1.0);
    const auto r100 = sched.at(100);
    CHECK(r100.q_rate == doctest::Approx(1.0 / 1.5));
    CHECK(r100.z_rate == doctest::Approx(1.0 / (1.0 + 0.1 * std::pow(100.0, 0.6))));
    CHECK(r100.eta_rate == doctest::Approx(1.0 / (1.0 + 0.01 * std::pow(100.0, 0.8))));
    // Separation ordering only sets in once t^0.2 > 10.
    for (std::uint64_t t : {200000ull, 1000000ull, 100000000ull}) {
        const auto r = sched.at(t);
        CHECK(r.z_rate > r.eta_rate);
        CHECK(r.eta_rate > r.q_rate);
    }
    double prev = 2.0;
    for (std::uint64_t t = 0; t < 5000; t += 7) {
        const auto r = sched.at(t);
        CHECK(r.q_rate <= prev);
        CHECK(r.q_rate > 0.0);
        prev = r.q_rate;
    }
    CHECK(StepSchedule::option(0.95).q().coef == 0.01);
    CHECK_THROWS_AS(StepSchedule(0.9, {1, 0.8}, {1, 0.6}, {1, 1}), std::invalid_argument);
}

TEST_CASE("drq_update hand-simulated step") {
    LearnerState st(2, 1);
    drq_update_entry(st, 0, 0, 1.0, 0.0, {2, 0.125}, 0.9, {0.5, 0.5, 0.5});
    CHECK(st.z1(0, 0) == 0.0);
    CHECK(st.z2(0, 0) == 0.0);
    CHECK(st.eta(0, 0) == 0.5);
    CHECK(st.q(0, 0) == doctest::Approx(0.725).epsilon(1e-15));
    CHECK(st.q(1, 0) == 0.0);
}

TEST_CASE("drq_update second step uses post-update moments") {
    LearnerState st(1, 1);
    st.eta(0, 0) = 1.0;
    const CressieReadParams p(2, 0.5);
    drq_update_entry(st, 0, 0, 0.5, 0.25, p, 0.9, {0.5, 0.2, 0.1});
    // Z1 = 0.5 * 0.75^2, Z2 = 0.5 * 0.75
    const double z1 = 0.5 * 0.5625, z2 = 0.375;
    CHECK(st.z1(0, 0) == doctest::Approx(z1));
    CHECK(st.z2(0, 0) == doctest::Approx(z2));
    const double eta = 1.0 + 0.2 * (1 - p.c_k() * z2 / std::sqrt(z1));
    CHECK(st.eta(0, 0) == doctest::Approx(eta));
    CHECK(st.q(0, 0) == doctest::Approx(0.1 * (0.5 - 0.9 * (p.c_k() * std::sqrt(z1) - eta))));
}

TEST_CASE("zero stepsizes leave the state unchanged") {
    LearnerState st(2, 2);
    st.q(1, 1) = 3.0;
    st.eta(1, 1) = 2.0;
    st.z1(1, 1) = 0.4;
    st.z2(1, 1) = 0.3;
    const LearnerState before = st;
    drq_update_entry(st, 1, 1, 0.7, 5.0, {2, 1}, 0.9, {0, 0, 0});
    CHECK(st == before);
}

TEST_CASE("rho = 0 stationary point reproduces the classical target") {
    // eta at its ceiling is infinite for c = 1; hold eta large with Z1 = (eta - y)^2.
    LearnerState st(1, 1);
    const double y = 3.0, r = 0.4;
    st.eta(0, 0) = 8.0;
    st.z1(0, 0) = 25.0;
    st.z2(0, 0) = 5.0;
    drq_update_entry(st, 0, 0, r, y, {2, 0}, 0.9, {0, 0, 1});
    CHECK(st.q(0, 0) == doctest::Approx(r + 0.9 * y));
}

TEST_CASE("drq_update touches only the visited entry and counts the step") {
    const auto mdp = random_mdp({4, 3, 0.9, 1.0, 6});
    DrqConfig cfg;
    cfg.schedule = StepSchedule::standard(0.9);
    LearnerState st(4, 3);
    RngStream rng(2);
    for (int n = 0; n < 200; ++n) {
        const std::size_t s = rng.uniform_index(4), a = rng.uniform_index(3);
        const LearnerState before = st;
        drq_update(st, sample_transition(mdp, StateId{s}, ActionId{a}, rng), cfg, n + 1);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 3; ++j) {
                if (i == s && j == a) continue;
                CHECK(st.q(i, j) == before.q(i, j));
                CHECK(st.eta(i, j) == before.eta(i, j));
                CHECK(st.z1(i, j) == before.z1(i, j));
            }
        CHECK(st.step == before.step + 1);
        CHECK(st.visits[s * 3 + a] == before.visits[s * 3 + a] + 1);
    }
}

TEST_CASE("clipping and moment invariants along a run") {
    const auto mdp = random_mdp({5, 2, 0.9, 1.0, 3});
    DrqConfig cfg{CressieReadParams(2, 1.0), 0.3, StepSchedule::standard(0.9), DrqMode::single_trajectory};
    const double M = mdp.value_bound(), eta_max = cfg.params.eta_ceiling(M);
    LearnerState st(5, 2);
    RngStream rng(1);
    StateId s{0};
    for (std::uint64_t n = 1; n <= 50000; ++n) {
        const ActionId a = epsilon_greedy(st.q, s, 0.3, rng);
        const auto sample = sample_transition(mdp, s, a, rng);
        drq_update(st, sample, cfg, st.visits[s.index * 2 + a.index] + 1);
        const std::size_t i = s.index, j = a.index;
        REQUIRE(st.q(i, j) >= 0.0);
        REQUIRE(st.q(i, j) <= M);
        REQUIRE(st.eta(i, j) >= 0.0);
        REQUIRE(st.eta(i, j) <= eta_max);
        REQUIRE(st.z1(i, j) >= 0.0);
        REQUIRE(st.z2(i, j) >= 0.0);
        REQUIRE(st.z2(i, j) * st.z2(i, j) <= st.z1(i, j) + 1e-9);
        s = sample.s_next;
    }
}

TEST_CASE("single-trajectory training") {
    SUBCASE("no steps leaves zero tables") {
        RngStream rng(0);
        DrqConfig cfg;
        const auto [st, curve] = train_single_trajectory(random_mdp({}), cfg, 0, rng, 10);
        for (double x : st.q.values()) CHECK(x == 0.0);
        CHECK(curve.rows.empty());
    }
    SUBCASE("self-loop converges to 1/(1-gamma)") {
        // rho = 0 is fast; for rho > 0 the eta lag shrinks only like t^-0.2.
        for (auto [rho, steps] : {std::pair{0.0, 100000ull}, {0.5, 20000000ull}, {2.0, 20000000ull}}) {
            RngStream rng(4);
            DrqConfig cfg{CressieReadParams(2, rho), 0.1, StepSchedule::standard(0.9), DrqMode::single_trajectory};
            const auto [st, curve] = train_single_trajectory(fixtures::self_loop(), cfg, steps, rng, steps / 10);
            CHECK(std::abs(st.q(0, 0) - 10.0) <= 0.05);
            CHECK(curve.rows.size() == 10);
            CHECK(curve.rows.back().step == steps);
        }
    }
    SUBCASE("curve records every curve_every steps and the last step") {
        RngStream rng(1);
        DrqConfig cfg;
        const auto [st, curve] = train_single_trajectory(random_mdp({}), cfg, 25, rng, 10);
        REQUIRE(curve.rows.size() == 3);
        CHECK(curve.rows[0].step == 10);
        CHECK(curve.rows[2].step == 25);
        CHECK(curve.rows[2].cumulative_samples == 25);
        CHECK(st.step == 25);
    }
    SUBCASE("same seed gives identical learners") {
        DrqConfig cfg;
        RngStream a(77), b(77);
        const auto x = train_single_trajectory(build_cliffwalking(0.5), cfg, 20000, a, 1000);
        const auto y = train_single_trajectory(build_cliffwalking(0.5), cfg, 20000, b, 1000);
        CHECK(x.first == y.first);
    }
    SUBCASE("terminal rows stay pinned") {
        DrqConfig cfg;
        RngStream rng(3);
        const auto mdp = build_cliffwalking(0.5);
        const auto [st, curve] = train_single_trajectory(mdp, cfg, 20000, rng, 0);
        for (std::size_t a = 0; a < 4; ++a) {
            CHECK(st.q(CliffGrid::terminal, a) == doctest::Approx((1.0 / 6.0) / 0.1));
            CHECK(st.visits[CliffGrid::terminal * 4 + a] == 0);
        }
    }
    SUBCASE("gamma mismatch is rejected") {
        DrqConfig cfg;
        cfg.schedule = StepSchedule::standard(0.95);
        RngStream rng(0);
        CHECK_THROWS_AS(train_single_trajectory(random_mdp({}), cfg, 10, rng, 1), std::invalid_argument);
    }
}

TEST_CASE("synchronous training") {
    SUBCASE("one step applies one update per pair") {
        RngStream rng(0);
        DrqConfig cfg;
        const auto [st, curve] = train_synchronous(random_mdp({}), cfg, 1, rng, 1);
        for (auto v : st.visits) CHECK(v == 1);
        CHECK(st.step == 1);
        CHECK(curve.rows.at(0).cumulative_samples == 10);
    }
    SUBCASE("deterministic model reaches the same limit for any rho") {
        // Transients differ with rho through the eta drift; the fixed point does not.
        const auto mdp = fixtures::chain3();
        const auto classical = fixtures::classical_q(mdp);
        for (double rho : {0.0, 1.5}) {
            DrqConfig cfg;
            cfg.params = CressieReadParams(2, rho);
            RngStream rng(5);
            const auto [st, curve] = train_synchronous(mdp, cfg, 100000, rng, 0);
            for (std::size_t s = 0; s < 4; ++s) CHECK(std::abs(st.q(s, 0) - classical[s]) <= 0.05);
        }
    }
    SUBCASE("self-loop converges") {
        RngStream rng(2);
        DrqConfig cfg{CressieReadParams(4, 1.0), 0.1, StepSchedule::standard(0.9), DrqMode::synchronous};
        const auto [st, curve] = train_synchronous(fixtures::self_loop(), cfg, 100000, rng, 0);
        CHECK(std::abs(st.q(0, 0) - 10.0) <= 0.05);
    }
}
