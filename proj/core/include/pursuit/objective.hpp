#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pursuit/motion.hpp"
#include "pursuit/scenario.hpp"
#include "pursuit/state.hpp"

namespace pursuit {

/// objective_part = shaping + event bonuses, position_part = capability
/// penalties + safety penalty, total = objective_part + position_part.
struct RewardBreakdown {
    double shaping = 0.0;
    double events = 0.0;
    double position = 0.0;
    double safety = 0.0;
    double objective_part = 0.0;
    double position_part = 0.0;
    double total = 0.0;
};

struct CaptureEvent {
    std::size_t criminal = 0;
    std::vector<std::size_t> capturers;  // roster indices, ascending

    bool operator==(const CaptureEvent&) const = default;
};

struct ArrivalEvent {
    std::size_t criminal = 0;
    std::size_t soi = 0;

    bool operator==(const ArrivalEvent&) const = default;
};

struct StepOutcome {
    std::vector<CaptureEvent> captures;
    std::vector<ArrivalEvent> arrivals;
    bool terminal = false;
};

/// lambda * (distance to the nearest visible opponent), or lambda * fallback when none is visible.
double shaping_reward(Vec2 self_position, std::span<const Vec2> visible_opponents, double lambda,
                      double fallback_distance);

/// Non-positive capability penalty: lawn penalty for UGVs on LAWN, edge penalty
/// within `edge_margin` of a region the platform may not enter (and of the arena
/// boundary when `arena_edge` is set).
double position_reward(const WorldMap& map, Platform platform, Vec2 position, const RewardConfig& config);

/// Police within distance <= capture_distance, if there are at least `min_capturers` of them.
std::optional<std::vector<std::string>> check_capture(Vec2 criminal, std::span<const TaggedPosition> police,
                                                      double capture_distance, int min_capturers);

/// Smallest SoI index within distance <= arrival_distance.
std::optional<std::size_t> check_soi_arrival(Vec2 criminal, std::span<const Vec2> sois, double arrival_distance);

double discounted_return(std::span<const double> rewards, double gamma);

/// Captures and arrivals for the active criminals of `world`. A criminal that
/// is captured on a step does not also register an arrival on that step.
StepOutcome evaluate_step(const Scenario& scenario, const JointState& world);

/// Per-robot rewards for one step. `unsafe[i]` marks robots in a same-team
/// pair with h_ij <= 0.
std::vector<RewardBreakdown> step_rewards(const Scenario& scenario, const JointState& world,
                                          const StepOutcome& outcome, const std::vector<bool>& unsafe);

}  // namespace pursuit
