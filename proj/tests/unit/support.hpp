#pragma once

#include <string>

#include "pursuit/scenario.hpp"

namespace pursuit::test {

/// Small valid scenario: 3 police (firefly, iris, husky) and one UGV criminal on a 40 x 40 map.
inline std::string small_scenario_json(int horizon = 50) {
    return R"({
      "map": {
        "width": 40, "height": 40,
        "regions": [
          {"kind": "building", "polygon": [[16, 16], [23, 16], [23, 23], [16, 23]]},
          {"kind": "nofly", "polygon": [[27, 4], [35, 4], [35, 12], [27, 12]]},
          {"kind": "hidden", "polygon": [[4, 27], [12, 27], [12, 35], [4, 35]]},
          {"kind": "lawn", "polygon": [[26, 26], [36, 26], [36, 34], [26, 34]]}
        ],
        "sois": [[6, 20], [34, 20]],
        "stations": [[3, 3], [37, 37], [20, 8]]
      },
      "robots": [
        {"id": "firefly", "team": "police", "model": "firefly"},
        {"id": "iris", "team": "police", "model": "iris", "perception_radius": 20},
        {"id": "husky", "team": "police", "model": "husky", "perception_radius": 5},
        {"id": "thief", "team": "criminal", "kind": "ugv", "v_max": 2, "a_max": 0.5, "perception_radius": 15}
      ],
      "episode": {"horizon": )" +
           std::to_string(horizon) + R"(, "dt": 0.2},
      "train": {"seed": 3, "episodes": 4, "batch": 16, "capacity": 2000, "hidden": [16, 16]}
    })";
}

inline Scenario small_scenario(int horizon = 50) { return load_scenario(small_scenario_json(horizon)); }

}  // namespace pursuit::test
