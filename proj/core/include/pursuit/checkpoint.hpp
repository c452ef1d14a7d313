#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "pursuit/mlp.hpp"

namespace pursuit {

/// Online and target networks of one robot.
struct NetBundle {
    std::string robot_id;
    Mlp policy;
    Mlp policy_target;
    Mlp critic;
    Mlp critic_target;
};

/// Binary checkpoint, little-endian:
///   "PURSUITC" | u32 version | u32 robot count
///   per robot: u32 id length, id bytes
///   shape table, per robot and net (policy, policy_target, critic, critic_target):
///     u32 layer count, per layer u32 rows, u32 cols, u8 activation
///   parameters: per layer row-major weights then bias, as f64
///   u64 FNV-1a hash of everything before it
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const std::filesystem::path& path, std::span<const NetBundle> nets);

std::vector<NetBundle> load_checkpoint(const std::filesystem::path& path);

/// As above, and additionally requires the stored ids to equal `roster_ids` in order.
std::vector<NetBundle> load_checkpoint(const std::filesystem::path& path, std::span<const std::string> roster_ids);

}  // namespace pursuit
