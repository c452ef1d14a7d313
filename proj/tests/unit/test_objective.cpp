#include <doctest.h>

#include <cmath>

#include "pursuit/errors.hpp"
#include "pursuit/objective.hpp"
#include "support.hpp"

using namespace pursuit;

namespace {

JointState place(const Scenario& sc, std::vector<Vec2> positions) {
    JointState w;
    w.robots.resize(sc.roster.size());
    for (std::size_t i = 0; i < positions.size(); ++i) w.robots[i].position = positions[i];
    return w;
}

Scenario quiet(Scenario sc) {
    sc.reward.lambda_police = 0.0;
    sc.reward.lambda_criminal = 0.0;
    return sc;
}

}  // namespace

TEST_CASE("shaping_reward") {
    const std::vector<Vec2> two{{3, 0}, {0, 5}};
    CHECK(shaping_reward({0, 0}, two, 1.0, 100.0) == doctest::Approx(3.0));
    const std::vector<Vec2> one{{3, 4}};
    CHECK(shaping_reward({0, 0}, one, -0.1, 100.0) == doctest::Approx(-0.5));
    CHECK(shaping_reward({0, 0}, one, 0.0, 100.0) == 0.0);
    CHECK(shaping_reward({0, 0}, {}, -0.1, 40.0) == doctest::Approx(-4.0));
    CHECK(shaping_reward({0, 0}, one, -0.2, 100.0) == 2.0 * shaping_reward({0, 0}, one, -0.1, 100.0));
    double last = -1e9;
    for (double d = 20.0; d >= 0.0; d -= 0.5) {
        const std::vector<Vec2> opp{{d, 0}};
        const double r = shaping_reward({0, 0}, opp, -0.1, 100.0);
        CHECK(r <= 0.0);
        CHECK(r >= last);
        last = r;
    }
}

TEST_CASE("position_reward") {
    const Scenario sc = test::small_scenario();
    CHECK(position_reward(sc.map, Platform::Ugv, {10, 10}, sc.reward) == 0.0);
    CHECK(position_reward(sc.map, Platform::Ugv, {30, 30}, sc.reward) == doctest::Approx(-0.5));
    CHECK(position_reward(sc.map, Platform::Uav, {30, 30}, sc.reward) == 0.0);
    CHECK(position_reward(sc.map, Platform::Uav, {10, 10}, sc.reward) == 0.0);
    CHECK(position_reward(sc.map, Platform::Uav, {26.7, 8}, sc.reward) == doctest::Approx(-1.0));
    CHECK(position_reward(sc.map, Platform::Ugv, {26.7, 8}, sc.reward) == 0.0);
    CHECK(position_reward(sc.map, Platform::Ugv, {15.8, 18}, sc.reward) == doctest::Approx(-1.0));
    RewardConfig off = sc.reward;
    off.position_enabled = false;
    CHECK(position_reward(sc.map, Platform::Ugv, {30, 30}, off) == 0.0);

    RewardConfig walls = sc.reward;
    CHECK(position_reward(sc.map, Platform::Uav, {0.2, 10}, walls) == 0.0);
    walls.arena_edge = true;
    CHECK(position_reward(sc.map, Platform::Uav, {0.2, 10}, walls) == doctest::Approx(-1.0));
    CHECK(position_reward(sc.map, Platform::Ugv, {10, 39.5}, walls) == doctest::Approx(-1.0));
    CHECK(position_reward(sc.map, Platform::Uav, {10, 10}, walls) == 0.0);
    walls.position_enabled = false;
    CHECK(position_reward(sc.map, Platform::Uav, {0.2, 10}, walls) == 0.0);
}

TEST_CASE("check_capture") {
    const std::vector<TaggedPosition> both{{"a", {0.5, 0}}, {"b", {0, 0.9}}, {"far", {5, 5}}};
    const auto c = check_capture({0, 0}, both, 1.0, 2);
    REQUIRE(c);
    CHECK(*c == std::vector<std::string>{"a", "b"});
    const std::vector<TaggedPosition> lone{{"a", {0.5, 0}}, {"b", {3, 0}}};
    CHECK_FALSE(check_capture({0, 0}, lone, 1.0, 2));
    const std::vector<TaggedPosition> edge{{"a", {1.0, 0}}, {"b", {0, -1.0}}};
    CHECK(check_capture({0, 0}, edge, 1.0, 2));
}

TEST_CASE("check_soi_arrival") {
    const std::vector<Vec2> sois{{5, 5}, {5.5, 5}, {20, 20}};
    CHECK(check_soi_arrival({20, 20}, sois, 1.0) == std::optional<std::size_t>(2));
    CHECK_FALSE(check_soi_arrival({10, 10}, sois, 1.0));
    CHECK(check_soi_arrival({5.2, 5}, sois, 1.0) == std::optional<std::size_t>(0));
}

TEST_CASE("discounted_return") {
    const std::vector<double> r{2, 1, 1};
    CHECK(discounted_return(r, 0.0) == 2.0);
    const std::vector<double> ones{1, 1, 1};
    CHECK(discounted_return(ones, 0.5) == doctest::Approx(1.75));
    CHECK(discounted_return(r, 1.0) == 4.0);
    Rng rng(4);
    for (int k = 0; k < 50; ++k) {
        std::vector<double> seq(1 + rng() % 1000);
        for (auto& x : seq) x = uniform(rng, -1, 1);
        const double g = uniform(rng, 0, 1);
        double oracle = 0.0;
        for (std::size_t t = seq.size(); t-- > 0;) oracle = seq[t] + g * oracle;
        CHECK(discounted_return(seq, g) == doctest::Approx(oracle).epsilon(1e-12));
    }
}

TEST_CASE("step_rewards") {
    const Scenario sc = quiet(test::small_scenario());
    const std::vector<bool> safe(4, false);

    SUBCASE("nothing happening gives zero") {
        const JointState w = place(sc, {{3, 3}, {10, 3}, {3, 10}, {10, 10}});
        const StepOutcome out = evaluate_step(sc, w);
        for (const auto& b : step_rewards(sc, w, out, safe)) CHECK(b.total == 0.0);
    }
    SUBCASE("capture bonus") {
        const JointState w = place(sc, {{10.5, 10}, {10, 10.5}, {3, 3}, {10, 10}});
        const StepOutcome out = evaluate_step(sc, w);
        REQUIRE(out.captures.size() == 1);
        CHECK(out.terminal);
        const auto r = step_rewards(sc, w, out, safe);
        CHECK(r[0].total == 10.0);
        CHECK(r[1].total == 10.0);
        CHECK(r[2].total == 0.0);
        CHECK(r[3].total == -10.0);
    }
    SUBCASE("arrival bonus") {
        const JointState w = place(sc, {{3, 3}, {10, 3}, {3, 10}, {6, 20.5}});
        const StepOutcome out = evaluate_step(sc, w);
        REQUIRE(out.arrivals.size() == 1);
        CHECK(out.terminal);
        const auto r = step_rewards(sc, w, out, safe);
        for (int i = 0; i < 3; ++i) CHECK(r[i].total == -10.0);
        CHECK(r[3].total == 10.0);
    }
    SUBCASE("capture beats arrival on the same step") {
        const JointState w = place(sc, {{6.5, 20}, {6, 20.5}, {3, 3}, {6, 20}});
        const StepOutcome out = evaluate_step(sc, w);
        CHECK(out.captures.size() == 1);
        CHECK(out.arrivals.empty());
    }
    SUBCASE("parts add up and the safety penalty is per robot") {
        const Scenario shaped = test::small_scenario();
        const JointState w = place(shaped, {{3, 3}, {3.2, 3}, {30, 30}, {10, 10}});
        const std::vector<bool> unsafe{true, true, false, false};
        const auto r = step_rewards(shaped, w, evaluate_step(shaped, w), unsafe);
        CHECK(r[0].safety == -1.0);
        CHECK(r[2].safety == 0.0);
        CHECK(r[2].position == doctest::Approx(-0.5));
        for (const auto& b : r) {
            CHECK(b.objective_part == b.shaping + b.events);
            CHECK(b.position_part == b.position + b.safety);
            CHECK(b.total == b.objective_part + b.position_part);
        }
        CHECK_THROWS_AS(step_rewards(shaped, w, {}, std::vector<bool>(2)), ShapeError);
    }
}
