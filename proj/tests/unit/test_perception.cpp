#include <doctest.h>

#include "pursuit/errors.hpp"
#include "pursuit/perception.hpp"
#include "support.hpp"

using namespace pursuit;

namespace {

Scenario two_robot(double range_p, double range_c) {
    return load_scenario(R"({
      "map": {"width": 100, "height": 100, "sois": [[50, 53], [54, 50]],
              "regions": [{"kind": "hidden", "polygon": [[80, 80], [90, 80], [90, 90], [80, 90]]}]},
      "robots": [
        {"id": "p", "team": "police", "kind": "uav", "v_max": 5, "a_max": 1, "perception_radius": )" +
                         std::to_string(range_p) + R"(},
        {"id": "c", "team": "criminal", "kind": "ugv", "v_max": 2, "a_max": 0.5, "perception_radius": )" +
                         std::to_string(range_c) + R"(}
      ]})");
}

JointState at(Vec2 p, Vec2 c) {
    JointState w;
    w.robots.resize(2);
    w.robots[0].position = p;
    w.robots[0].velocity = {1, 2};
    w.robots[1].position = c;
    w.robots[1].velocity = {-1, 0.5};
    return w;
}

}  // namespace

TEST_CASE("visible") {
    const Scenario sc = two_robot(30, 15);
    const RobotSpec firefly = *preset("firefly");
    CHECK(visible(firefly, {10, 10}, {20, 10}, sc.map));
    CHECK_FALSE(visible(firefly, {84, 84}, {85, 85}, sc.map));
    const RobotSpec husky = *preset("husky");
    CHECK_FALSE(visible(husky, {0, 0}, {15.0001, 0}, sc.map));
    CHECK(visible(husky, {0, 0}, {15.0, 0}, sc.map));
    // Observer-inside variant: a UAV above the hidden area is blind, the target rule is not applied.
    CHECK_FALSE(visible(firefly, {85, 85}, {70, 85}, sc.map, HiddenRule::ObserverInside));
    CHECK(visible(firefly, {70, 85}, {85, 85}, sc.map, HiddenRule::ObserverInside));
    CHECK(visible(firefly, {85, 85}, {70, 85}, sc.map, HiddenRule::TargetInside));
}

TEST_CASE("build_observation layout") {
    const Scenario sc = two_robot(30, 30);
    const JointState w = at({50, 50}, {50, 50});
    const auto op = build_observation(sc, w, "p");
    REQUIRE(op.size() == 9);
    CHECK(op[0] == 50);
    CHECK(op[2] == 1);
    CHECK(op[3] == 2);
    CHECK(op[4] == 1.0);  // flag, even though the displacement is zero
    CHECK(op[7] == -2.0);
    CHECK(op[8] == -1.5);
    const auto oc = build_observation(sc, w, "c");
    REQUIRE(oc.size() == 11);
    CHECK(oc[9] == doctest::Approx(3.0));
    CHECK(oc[10] == doctest::Approx(4.0));
}

TEST_CASE("build_observation masks robots out of range") {
    const Scenario sc = two_robot(5, 5);
    const JointState w = at({10, 10}, {60, 60});
    for (const char* id : {"p", "c"}) {
        const auto o = build_observation(sc, w, id);
        for (std::size_t k = 4; k < 9; ++k) CHECK(o[k] == 0.0);
    }
    CHECK_THROWS_AS(build_observation(sc, w, "nobody"), LookupError);
}

TEST_CASE("scalar distance mode stores |d|") {
    Scenario sc = two_robot(30, 30);
    sc.perception.scalar_distance = true;
    const auto o = build_observation(sc, at({10, 10}, {13, 14}), "p");
    CHECK(o[5] == doctest::Approx(5.0));
    CHECK(o[6] == 0.0);
}

TEST_CASE("observation_dim") {
    const Scenario sc = test::small_scenario();
    CHECK(observation_dim(sc, "firefly") == 19);
    CHECK(observation_dim(sc, "thief") == 21);
    const Scenario two = load_scenario(R"({"map": {"width": 5, "height": 5},
      "robots": [{"id": "p", "team": "police", "model": "iris"}, {"id": "c", "team": "criminal", "model": "husky"}]})");
    CHECK(observation_dim(two, "p") == 9);
    CHECK(observation_dim(two, "c") == 9);
    CHECK(observation_scale(sc, 3).size() == 21);
}
