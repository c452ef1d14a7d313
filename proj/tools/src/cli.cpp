#include "pursuit/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pursuit/checkpoint.hpp"
#include "pursuit/engine.hpp"
#include "pursuit/errors.hpp"
#include "pursuit/metrics.hpp"

#ifndef PURSUIT_GIT_DESCRIBE
#define PURSUIT_GIT_DESCRIBE "unknown"
#endif

namespace pursuit::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

unsigned arena_threads() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* cap = std::getenv("PURSUIT_ARENA_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(cap, &end, 10);
        if (end != cap && v >= 1) n = std::min(n, static_cast<unsigned>(v));
    }
    return n;
}

namespace {

/// Runs a CLI11 app over `args` and maps parse failures to the usage exit code.
/// Returns -1 when parsing succeeded and the command should proceed.
int parse(CLI::App& app, const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << app.get_name() << ": " << e.what() << '\n';
        return kExitUsage;
    }
    return -1;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw PreconditionError("cannot write " + path.string());
    f << text;
}

json read_json_file(const fs::path& path) {
    std::ifstream f(path);
    if (!f) throw ParseError(path.string(), "cannot open file");
    try {
        return json::parse(f);
    } catch (const json::exception& e) {
        throw ParseError(path.string(), e.what());
    }
}

json episode_record(const Scenario& sc, const EpisodeRow& row) {
    json returns = json::object();
    for (std::size_t i = 0; i < sc.roster.size(); ++i) returns[sc.roster[i].id] = row.result.returns[i];
    json captures = json::array();
    for (const auto& c : row.result.capture_events) {
        json ids = json::array();
        for (const std::size_t p : c.capturers) ids.push_back(sc.roster[p].id);
        captures.push_back({{"step", c.step}, {"criminal", sc.roster[c.criminal].id}, {"capturers", ids}});
    }
    json arrivals = json::array();
    for (const auto& a : row.result.arrival_events) {
        arrivals.push_back({{"step", a.step}, {"criminal", sc.roster[a.criminal].id}, {"soi", a.soi}});
    }
    return {{"schema_version", kSchemaVersion},
            {"episode", row.episode},
            {"returns", returns},
            {"mean_reward", row.mean_reward},
            {"police_reward", row.police_reward},
            {"criminal_reward", row.criminal_reward},
            {"success", row.result.success},
            {"steps", row.result.steps_used},
            {"safety_violations", row.result.safety_violations},
            {"noise", row.noise},
            {"captures", captures},
            {"arrivals", arrivals}};
}

std::vector<std::string> roster_ids(const Scenario& sc) {
    std::vector<std::string> ids;
    for (const auto& r : sc.roster) ids.push_back(r.id);
    return ids;
}

/// Lists the JSON pointer paths that differ between two configs.
std::vector<std::string> config_diff(const json& before, const json& after) {
    std::vector<std::string> lines;
    for (const auto& op : json::diff(before, after)) {
        const std::string path = op["path"].get<std::string>();
        std::string line = op["op"].get<std::string>() + " " + path;
        if (op.contains("value")) {
            line += ": " + before.value(json::json_pointer(path), json()).dump() + " -> " + op["value"].dump();
        }
        lines.push_back(line);
    }
    return lines;
}

}  // namespace

int cmd_train(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Train all robots of a scenario", "train"};
    std::string config_path;
    std::string manifest_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> episodes;
    bool ablate = false;
    auto* config_opt = app.add_option("--config", config_path, "Scenario JSON file");
    auto* manifest_opt = app.add_option("--manifest", manifest_path, "Rerun from an existing manifest.json");
    config_opt->excludes(manifest_opt);
    app.add_option("--out", out_dir, "Run directory");
    app.add_option("--seed", seed, "Overrides train.seed");
    app.add_option("--episodes", episodes, "Overrides train.episodes");
    app.add_flag("--ablate-proficiency", ablate, "Train the no-proficiency baseline");
    if (const int rc = parse(app, args, out, err); rc >= 0) return rc;
    if (config_path.empty() && manifest_path.empty()) {
        err << "train: --config or --manifest is required\n";
        return kExitUsage;
    }

    Scenario sc;
    json manifest;
    try {
        if (!manifest_path.empty()) {
            manifest = read_json_file(manifest_path);
            if (manifest.value("command", "") != "train" || !manifest.contains("config")) {
                throw ParseError(manifest_path, "not a train manifest");
            }
            sc = load_scenario(manifest["config"].dump());
            config_path = manifest.value("config_path", "");
            if (out_dir.empty()) out_dir = manifest.value("out_dir", "");
            if (seed) sc.train.seed = *seed;
            if (episodes) sc.train.episodes = *episodes;
            if (ablate) sc = ablate_proficiency(std::move(sc));
            validate(sc);
        } else {
            sc = load_scenario_file(config_path);
            if (seed) sc.train.seed = *seed;
            if (episodes) sc.train.episodes = *episodes;
            if (ablate) sc = ablate_proficiency(std::move(sc));
            validate(sc);
        }
    } catch (const Error& e) {
        err << "train: " << e.what() << '\n';
        return kExitUsage;
    }
    if (out_dir.empty()) {
        err << "train: --out is required\n";
        return kExitUsage;
    }

    const fs::path dir(out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        err << "train: cannot create " << dir << ": " << ec.message() << '\n';
        return kExitUsage;
    }

    const json resolved = to_json(sc);
    manifest = {{"schema_version", kSchemaVersion},
                {"command", "train"},
                {"config_path", config_path},
                {"config", resolved},
                {"seed", sc.train.seed},
                {"ablate_proficiency", ablate},
                {"git_describe", PURSUIT_GIT_DESCRIBE},
                {"out_dir", out_dir}};
    // When rerunning from a manifest the ablation is already part of the snapshot.
    if (!manifest_path.empty()) manifest["ablate_proficiency"] = false;
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");
    write_text(dir / "config.json", resolved.dump(2) + "\n");

    std::ofstream jsonl(dir / "metrics.jsonl", std::ios::binary | std::ios::trunc);
    std::ofstream csv(dir / "summary.csv", std::ios::binary | std::ios::trunc);
    csv << "episode,mean_reward,success,captures\n";

    TrainHooks hooks;
    hooks.checkpoint = dir / "checkpoint.bin";
    hooks.on_episode = [&](const EpisodeRow& row) {
        jsonl << episode_record(sc, row).dump() << '\n';
        csv << row.episode << ',' << format_double(row.mean_reward) << ',' << (row.result.success ? 1 : 0) << ','
            << row.result.capture_events.size() << '\n';
    };

    TrainingReport report;
    try {
        report = train(sc, hooks);
    } catch (const DivergenceError& e) {
        err << "train: diverged: " << e.what() << '\n';
        return kExitDivergence;
    } catch (const NumericError& e) {
        err << "train: numeric failure: " << e.what() << '\n';
        return kExitDivergence;
    } catch (const Error& e) {
        err << "train: " << e.what() << '\n';
        return kExitUsage;
    }

    std::size_t successes = 0;
    for (const auto& row : report.rows) successes += row.result.success ? 1 : 0;
    const json summary = {{"schema_version", kSchemaVersion},
                          {"episodes", report.rows.size()},
                          {"train_steps", report.train_steps},
                          {"wall_clock_seconds", report.wall_clock_seconds},
                          {"training_success_rate",
                           report.rows.empty() ? 0.0
                                               : static_cast<double>(successes) /
                                                     static_cast<double>(report.rows.size())}};
    write_text(dir / "report.json", summary.dump(2) + "\n");
    out << "trained " << report.rows.size() << " episodes (" << report.train_steps << " updates) in "
        << std::fixed << std::setprecision(1) << report.wall_clock_seconds << " s -> " << dir.string() << '\n';
    return kExitOk;
}

int cmd_eval(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Evaluate a checkpoint without exploration noise", "eval"};
    std::string config_path;
    std::string checkpoint_path;
    std::string csv_path;
    int episodes = 100;
    std::vector<std::uint64_t> seeds{0};
    bool ablate = false;
    app.add_option("--config", config_path, "Scenario JSON file")->required();
    app.add_option("--checkpoint", checkpoint_path, "checkpoint.bin from train")->required();
    app.add_option("--episodes", episodes, "Episodes per seed");
    app.add_option("--seeds", seeds, "Evaluation seeds (comma separated)")->delimiter(',');
    app.add_option("--out", csv_path, "CSV file for the metrics");
    app.add_flag("--ablate-proficiency", ablate, "Evaluate under the no-proficiency baseline");
    if (const int rc = parse(app, args, out, err); rc >= 0) return rc;
    if (episodes < 1) {
        err << "eval: --episodes must be at least 1\n";
        return kExitUsage;
    }
    if (seeds.empty()) {
        err << "eval: --seeds must name at least one seed\n";
        return kExitUsage;
    }

    Scenario sc;
    AgentNets nets;
    try {
        sc = load_scenario_file(config_path);
        if (ablate) {
            const Scenario ablated = ablate_proficiency(sc);
            out << "config changes for --ablate-proficiency:\n";
            for (const auto& line : config_diff(to_json(sc), to_json(ablated))) out << "  " << line << '\n';
            sc = ablated;
        }
        validate(sc);
        const auto ids = roster_ids(sc);
        nets = agent_nets_from(sc, load_checkpoint(checkpoint_path, ids));
    } catch (const Error& e) {
        err << "eval: " << e.what() << '\n';
        return kExitUsage;
    }

    Metrics m;
    try {
        m = evaluate(sc, nets, static_cast<std::size_t>(episodes), seeds, arena_threads());
    } catch (const NumericError& e) {
        err << "eval: numeric failure: " << e.what() << '\n';
        return kExitDivergence;
    }

    std::vector<std::pair<std::string, double>> rows = {
        {"episodes", static_cast<double>(m.episodes)},
        {"task_success_rate", m.task_success_rate},
        {"task_success_ci95", m.success_ci_half_width},
        {"mean_episode_reward", m.mean_episode_reward},
        {"mean_episode_reward_ci95", m.reward_ci_half_width},
        {"mean_police_reward", m.mean_police_reward},
        {"mean_criminal_reward", m.mean_criminal_reward},
        {"capture_events", static_cast<double>(m.capture_events)},
        {"no_captures", m.no_captures ? 1.0 : 0.0},
    };
    for (std::size_t i = 0; i < sc.roster.size(); ++i) {
        rows.emplace_back("engagement." + sc.roster[i].id, m.capture_engagement_rate[i]);
    }

    out << std::left << std::setw(28) << "metric" << "value\n";
    for (const auto& [key, value] : rows) out << std::left << std::setw(28) << key << format_double(value) << '\n';
    if (m.no_captures) out << "note: no captures occurred; engagement rates are reported as 0\n";

    if (!csv_path.empty()) {
        std::ostringstream csv;
        csv << "metric,value\nschema_version," << kSchemaVersion << '\n';
        for (const auto& [key, value] : rows) csv << key << ',' << format_double(value) << '\n';
        try {
            write_text(csv_path, csv.str());
        } catch (const Error& e) {
            err << "eval: " << e.what() << '\n';
            return kExitUsage;
        }
    }
    return kExitOk;
}

namespace {

std::vector<double> read_summary_rewards(const fs::path& run_dir) {
    const fs::path path = run_dir / "summary.csv";
    std::ifstream f(path);
    if (!f) throw ParseError(path.string(), "cannot open file");
    std::string line;
    std::getline(f, line);
    if (line.rfind("episode,mean_reward", 0) != 0) throw ParseError(path.string(), "unexpected header");
    std::vector<double> rewards;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        const auto a = line.find(',');
        const auto b = line.find(',', a + 1);
        if (a == std::string::npos || b == std::string::npos) throw ParseError(path.string(), "malformed row");
        double v = 0.0;
        const auto res = std::from_chars(line.data() + a + 1, line.data() + b, v);
        if (res.ec != std::errc{}) throw ParseError(path.string(), "malformed mean_reward");
        rewards.push_back(v);
    }
    return rewards;
}

}  // namespace

int cmd_plotdata(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Export smoothed learning curves with 95% confidence bands", "plotdata"};
    std::vector<std::string> runs;
    std::size_t window = 100;
    std::string csv_path;
    app.add_option("runs", runs, "Run directories written by train")->required();
    app.add_option("--window", window, "Moving-average window in episodes");
    app.add_option("--out", csv_path, "CSV file (stdout when omitted)");
    if (const int rc = parse(app, args, out, err); rc >= 0) return rc;
    if (window < 1) {
        err << "plotdata: --window must be at least 1\n";
        return kExitUsage;
    }

    std::vector<std::vector<double>> curves;
    try {
        for (const auto& r : runs) curves.push_back(read_summary_rewards(r));
    } catch (const Error& e) {
        err << "plotdata: " << e.what() << '\n';
        return kExitUsage;
    }
    for (std::size_t k = 1; k < curves.size(); ++k) {
        if (curves[k].size() != curves[0].size()) {
            err << "plotdata: " << runs[k] << " has " << curves[k].size() << " episodes, " << runs[0] << " has "
                << curves[0].size() << '\n';
            return kExitUsage;
        }
    }

    std::ostringstream csv;
    csv << "episode,mean,lo,hi\n";
    for (const auto& p : learning_curve(curves, window)) {
        csv << p.episode << ',' << format_double(p.mean) << ',' << format_double(p.lo) << ',' << format_double(p.hi)
            << '\n';
    }
    if (csv_path.empty()) {
        out << csv.str();
    } else {
        try {
            write_text(csv_path, csv.str());
        } catch (const Error& e) {
            err << "plotdata: " << e.what() << '\n';
            return kExitUsage;
        }
    }
    return kExitOk;
}

int cmd_inspect(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Validate a scenario and print its resolved form", "inspect"};
    std::string config_path;
    bool ablate = false;
    app.add_option("--config", config_path, "Scenario JSON file")->required();
    app.add_flag("--ablate-proficiency", ablate, "Show the no-proficiency baseline");
    if (const int rc = parse(app, args, out, err); rc >= 0) return rc;

    Scenario sc;
    try {
        sc = load_scenario_file(config_path);
        if (ablate) sc = ablate_proficiency(std::move(sc));
        validate(sc);
    } catch (const Error& e) {
        err << "inspect: " << e.what() << '\n';
        return kExitUsage;
    }
    out << "arena " << format_double(sc.map.width) << " x " << format_double(sc.map.height) << ", "
        << sc.map.regions.size() << " regions, " << sc.map.sois.size() << " SoIs, " << sc.map.stations.size()
        << " stations\n";
    for (std::size_t i = 0; i < sc.roster.size(); ++i) {
        const auto& r = sc.roster[i];
        out << "  " << std::left << std::setw(12) << r.id << std::setw(9) << to_string(r.team) << std::setw(4)
            << to_string(r.platform) << " v_max " << format_double(r.v_max) << "  a_max " << format_double(r.a_max)
            << "  range " << format_double(r.perception_radius) << "  obs_dim " << observation_dim(sc, i) << '\n';
    }
    out << to_json(sc).dump(2) << '\n';
    return kExitOk;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    static const char* usage =
        "usage: pursuit <train|eval|plotdata|inspect> [options]\n"
        "  train     --config FILE --out DIR [--seed N] [--episodes N] [--ablate-proficiency]\n"
        "            --manifest FILE reruns a previous run\n"
        "  eval      --config FILE --checkpoint FILE [--episodes N] [--seeds A,B,..] [--out CSV]\n"
        "            [--ablate-proficiency]\n"
        "  plotdata  RUN_DIR... [--window N] [--out CSV]\n"
        "  inspect   --config FILE [--ablate-proficiency]\n";
    if (args.empty()) {
        err << usage;
        return kExitUsage;
    }
    const std::string& sub = args.front();
    const std::vector<std::string> rest(args.begin() + 1, args.end());
    if (sub == "train") return cmd_train(rest, out, err);
    if (sub == "eval") return cmd_eval(rest, out, err);
    if (sub == "plotdata") return cmd_plotdata(rest, out, err);
    if (sub == "inspect") return cmd_inspect(rest, out, err);
    if (sub == "-h" || sub == "--help" || sub == "help") {
        out << usage;
        return kExitOk;
    }
    err << "unknown command '" << sub << "'\n" << usage;
    return kExitUsage;
}

}  // namespace pursuit::cli
