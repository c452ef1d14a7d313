#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pursuit::cli {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitDivergence = 3;

/// Version tag of the metrics.jsonl, summary.csv, eval and plotdata formats.
inline constexpr int kSchemaVersion = 1;

/// Parses `args` (without the program name) and runs the chosen subcommand.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int cmd_train(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cmd_eval(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cmd_plotdata(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cmd_inspect(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Worker count for evaluation: hardware concurrency capped by PURSUIT_ARENA_THREADS.
unsigned arena_threads();

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

}  // namespace pursuit::cli
