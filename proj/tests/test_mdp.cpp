#include <doctest.h>

#include <stdexcept>
#include <vector>

#include "drqlab/mdp.hpp"
#include "drqlab/rng.hpp"
#include "fixtures.hpp"

using namespace drqlab;

TEST_CASE("TabularMdp rejects malformed models") {
    CHECK_THROWS_AS(TabularMdp::from_dense(2, 1, {{0.6, 0.6}, {0, 1}}, {0, 0}, 0.9, {1, 0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(TabularMdp::from_dense(1, 1, {{1.0}}, {1.5}, 0.9, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(TabularMdp::from_dense(1, 1, {{1.0}}, {0.5}, 1.0, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(TabularMdp::from_dense(2, 1, {{-0.1, 1.1}, {0, 1}}, {0, 0}, 0.9, {1, 0}),
                    std::invalid_argument);
    // terminal must self-loop
    CHECK_THROWS_AS(TabularMdp::from_dense(2, 1, {{0, 1}, {1, 0}}, {0, 0}, 0.9, {1, 0}, {1}),
                    std::invalid_argument);
}

TEST_CASE("start state is the lowest argmax of the initial distribution") {
    auto mdp = TabularMdp::from_dense(3, 1, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {0, 0, 0}, 0.9,
                                      {0.25, 0.5, 0.25});
    CHECK(mdp.start_state() == 1);
    mdp.set_start_state(2);
    CHECK(mdp.start_state() == 2);
    auto uniform = TabularMdp::from_dense(2, 1, {{1, 0}, {0, 1}}, {0, 0}, 0.9, {0.5, 0.5});
    CHECK(uniform.start_state() == 0);
    auto single = TabularMdp::from_dense(2, 1, {{1, 0}, {0, 1}}, {0, 0}, 0.9, {1, 0});
    CHECK_THROWS_AS(single.set_start_state(1), std::invalid_argument);
}

TEST_CASE("sample_transition on degenerate rows") {
    auto mdp = TabularMdp::from_dense(4, 1, {{0, 0, 0, 1}, {1, 0, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}},
                                      {0.5, 0.0, 0.0, 0.0}, 0.9, {1, 0, 0, 0});
    RngStream rng(7);
    for (int i = 0; i < 1000; ++i) {
        const auto t = sample_transition(mdp, StateId{0}, ActionId{0}, rng);
        CHECK(t.s_next.index == 3);
        CHECK(t.r == 0.5);
        CHECK(sample_transition(mdp, StateId{1}, ActionId{0}, rng).s_next.index == 0);
    }
    CHECK(rng.draws() == 2000);  // one variate per draw
    CHECK_THROWS_AS(sample_transition(mdp, StateId{4}, ActionId{0}, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_transition(mdp, StateId{0}, ActionId{1}, rng), std::invalid_argument);
}

TEST_CASE("sample_transition frequencies match the row") {
    auto coin = TabularMdp::from_dense(2, 1, {{0.5, 0.5}, {0, 1}}, {0, 0}, 0.9, {1, 0});
    RngStream rng(11);
    int zeros = 0;
    for (int i = 0; i < 100000; ++i) zeros += sample_transition(coin, StateId{0}, ActionId{0}, rng).s_next.index == 0;
    CHECK(std::abs(zeros / 1e5 - 0.5) <= 0.01);

    // Total variation of 1e5 draws against every row of a random model.
    RngStream gen(3);
    std::vector<std::vector<double>> dense;
    for (int r = 0; r < 6; ++r) {
        std::vector<double> row(3);
        double sum = 0;
        for (double& x : row) sum += (x = gen.uniform() + 0.05);
        for (double& x : row) x /= sum;
        dense.push_back(row);
    }
    auto mdp = TabularMdp::from_dense(3, 2, dense, {0, 0, 0, 0, 0, 0}, 0.9, {1, 0, 0});
    for (std::size_t s = 0; s < 3; ++s)
        for (std::size_t a = 0; a < 2; ++a) {
            std::vector<double> counts(3, 0.0);
            for (int i = 0; i < 100000; ++i) counts[sample_transition(mdp, StateId{s}, ActionId{a}, rng).s_next.index] += 1;
            double tv = 0;
            for (std::size_t j = 0; j < 3; ++j) tv += std::abs(counts[j] / 1e5 - dense[s * 2 + a][j]);
            CHECK(tv / 2 <= 0.02);
        }
}

TEST_CASE("duplicate next states with distinct rewards") {
    std::vector<TabularMdp::Row> rows = {{{1, 0.25, 1.0}, {1, 0.75, 0.0}}, {{1, 1.0, 0.0}}};
    TabularMdp mdp(2, 1, rows, 0.9, {1, 0}, {1});
    CHECK(mdp.expected_reward(0, 0) == doctest::Approx(0.25));
    CHECK(mdp.dense_row(0, 0) == std::vector<double>{0.0, 1.0});
}

TEST_CASE("same seed gives the same samples") {
    auto mdp = fixtures::two_state_chain();
    RngStream a(42), b(42);
    for (int i = 0; i < 500; ++i) {
        const auto x = sample_transition(mdp, StateId{0}, ActionId{0}, a);
        const auto y = sample_transition(mdp, StateId{0}, ActionId{0}, b);
        REQUIRE(x.s_next == y.s_next);
        REQUIRE(x.r == y.r);
    }
    CHECK(RngStream::substream(1, 0).next_u64() != RngStream::substream(1, 1).next_u64());
    CHECK(RngStream::substream(1, 5).next_u64() == RngStream::substream(1, 5).next_u64());
}

TEST_CASE("greedy_action ties go to the lowest index") {
    QTable q(3, 3);
    CHECK(greedy_action(q, StateId{0}).index == 0);
    q(1, 0) = 0.1;
    q(1, 1) = 0.9;
    CHECK(greedy_action(q, StateId{1}).index == 1);
    q(2, 0) = 0.5;
    q(2, 1) = 0.5;
    q(2, 2) = 0.4;
    CHECK(greedy_action(q, StateId{2}).index == 0);
}

TEST_CASE("epsilon_greedy") {
    QTable q(1, 2);
    q(0, 0) = 1.0;
    RngStream rng(5);
    SUBCASE("eps = 0 is greedy and uses one variate") {
        for (int i = 0; i < 100; ++i) CHECK(epsilon_greedy(q, StateId{0}, 0.0, rng).index == 0);
        CHECK(rng.draws() == 100);
    }
    SUBCASE("eps = 1 is uniform") {
        int zeros = 0;
        for (int i = 0; i < 100000; ++i) zeros += epsilon_greedy(q, StateId{0}, 1.0, rng).index == 0;
        CHECK(std::abs(zeros / 1e5 - 0.5) <= 0.01);
        CHECK(rng.draws() == 200000);
    }
    SUBCASE("eps = 0.1") {
        int zeros = 0;
        for (int i = 0; i < 100000; ++i) zeros += epsilon_greedy(q, StateId{0}, 0.1, rng).index == 0;
        CHECK(std::abs(zeros / 1e5 - 0.95) <= 0.01);
    }
    CHECK_THROWS_AS(epsilon_greedy(q, StateId{0}, 1.5, rng), std::invalid_argument);
    CHECK_THROWS_AS(epsilon_greedy(q, StateId{0}, -0.1, rng), std::invalid_argument);
}

TEST_CASE("rollout returns") {
    RngStream rng(1);
    SUBCASE("terminal start") {
        auto mdp = TabularMdp::from_dense(1, 1, {{1.0}}, {0.0}, 0.9, {1.0}, {0});
        const auto r = rollout(mdp, QTable(1, 1), 0.0, 10, rng);
        CHECK(r.discounted_return == 0.0);
        CHECK(r.undiscounted_return == 0.0);
        CHECK(r.length == 0);
    }
    SUBCASE("self-loop truncated at max_steps") {
        const auto r = rollout(fixtures::self_loop(), QTable(1, 1), 0.0, 2, rng);
        CHECK(r.discounted_return == doctest::Approx(1.9));
        CHECK(r.undiscounted_return == doctest::Approx(2.0));
        CHECK(r.length == 2);
    }
    SUBCASE("three-step chain") {
        const auto r = rollout(fixtures::chain3(), QTable(4, 1), 0.0, 100, rng);
        CHECK(r.discounted_return == doctest::Approx(2.71));
        CHECK(r.undiscounted_return == doctest::Approx(3.0));
        CHECK(r.length == 3);
    }
    SUBCASE("raw units") {
        auto mdp = TabularMdp::from_dense(2, 1, {{0, 1}, {0, 1}}, {0.5, 0.0}, 0.9, {1, 0}, {1},
                                          RewardScale{6.0, -1.0});
        const auto r = rollout(mdp, QTable(2, 1), 0.0, 10, rng);
        CHECK(r.undiscounted_return == doctest::Approx(2.0));
    }
    CHECK_THROWS_AS(rollout(fixtures::self_loop(), QTable(1, 1), 0.0, 0, rng), std::invalid_argument);
}

TEST_CASE("greedy rollouts on deterministic models are deterministic") {
    auto mdp = fixtures::chain3();
    RngStream a(1), b(999);
    const auto x = rollout(mdp, QTable(4, 1), 0.0, 50, a);
    const auto y = rollout(mdp, QTable(4, 1), 0.0, 50, b);
    CHECK(x.discounted_return == y.discounted_return);
    CHECK(x.length == y.length);
}

TEST_CASE("pin_terminal_values uses the absorbing value") {
    std::vector<TabularMdp::Row> rows = {{{1, 1.0, 0.5}}, {{1, 1.0, 0.2}}};
    TabularMdp mdp(2, 1, rows, 0.9, {1, 0}, {1});
    QTable q(2, 1);
    pin_terminal_values(mdp, q);
    CHECK(q(0, 0) == 0.0);
    CHECK(q(1, 0) == doctest::Approx(2.0));
}

TEST_CASE("QTable state values") {
    QTable q(2, 3);
    q(0, 2) = 4.0;
    q(1, 0) = -1.0;
    q(1, 1) = -2.0;
    q(1, 2) = -3.0;
    CHECK(q.state_value(0) == 4.0);
    CHECK(q.state_values() == std::vector<double>{4.0, -1.0});
}
