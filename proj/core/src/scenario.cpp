#include "pursuit/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <numeric>
#include <set>
#include <sstream>

#include "pursuit/errors.hpp"

namespace pursuit {

using nlohmann::json;

std::string_view to_string(Team team) { return team == Team::Police ? "police" : "criminal"; }
std::string_view to_string(Platform platform) { return platform == Platform::Uav ? "uav" : "ugv"; }

std::string_view to_string(RegionKind kind) {
    switch (kind) {
        case RegionKind::Hidden: return "hidden";
        case RegionKind::NoFly: return "nofly";
        case RegionKind::Building: return "building";
        case RegionKind::Lawn: return "lawn";
    }
    return "?";
}

std::optional<RobotSpec> preset(std::string_view model) {
    RobotSpec s;
    s.model = std::string(model);
    if (model == "firefly") {
        s.platform = Platform::Uav;
        s.v_max = 5.0;
        s.a_max = 1.0;
        s.perception_radius = 30.0;
    } else if (model == "iris") {
        s.platform = Platform::Uav;
        s.v_max = 7.0;
        s.a_max = 2.0;
        s.perception_radius = 30.0;
    } else if (model == "husky") {
        s.platform = Platform::Ugv;
        s.v_max = 1.0;
        s.a_max = 0.1;
        s.perception_radius = 15.0;
        s.w_max = 1.0;
        s.w_delta = 0.1;
    } else {
        return std::nullopt;
    }
    return s;
}

std::size_t Scenario::index_of(const std::string& robot_id) const {
    for (std::size_t i = 0; i < roster.size(); ++i) {
        if (roster[i].id == robot_id) {
            return i;
        }
    }
    throw LookupError("unknown robot id '" + robot_id + "'");
}

std::size_t Scenario::count(Team team) const {
    return static_cast<std::size_t>(
        std::count_if(roster.begin(), roster.end(), [team](const RobotSpec& r) { return r.team == team; }));
}

namespace {

// Reads typed fields from one JSON object and rejects keys nobody asked about.
class Section {
public:
    Section(const json& node, std::string path, std::initializer_list<std::string_view> allowed)
        : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) {
            throw ParseError(path_.empty() ? "<root>" : path_, "expected an object");
        }
        for (const auto& [key, value] : node_.items()) {
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
                throw ParseError(join(key), "unknown key");
            }
        }
    }

    bool has(const std::string& key) const { return node_.contains(key); }
    std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    const json& raw(const std::string& key) const { return node_.at(key); }

    void read(const std::string& key, double& out) const {
        if (!has(key)) return;
        const json& v = node_.at(key);
        if (!v.is_number()) throw ParseError(join(key), "expected a number");
        out = v.get<double>();
    }

    void read(const std::string& key, int& out) const {
        if (!has(key)) return;
        const json& v = node_.at(key);
        if (!v.is_number_integer()) throw ParseError(join(key), "expected an integer");
        out = v.get<int>();
    }

    void read(const std::string& key, std::uint64_t& out) const {
        if (!has(key)) return;
        const json& v = node_.at(key);
        if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)) {
            throw ParseError(join(key), "expected a non-negative integer");
        }
        out = v.get<std::uint64_t>();
    }

    void read(const std::string& key, bool& out) const {
        if (!has(key)) return;
        const json& v = node_.at(key);
        if (!v.is_boolean()) throw ParseError(join(key), "expected a boolean");
        out = v.get<bool>();
    }

    void read(const std::string& key, std::string& out) const {
        if (!has(key)) return;
        const json& v = node_.at(key);
        if (!v.is_string()) throw ParseError(join(key), "expected a string");
        out = v.get<std::string>();
    }

    std::string required_string(const std::string& key) const {
        if (!has(key)) throw ParseError(join(key), "missing required key");
        std::string s;
        read(key, s);
        return s;
    }

    double required_number(const std::string& key) const {
        if (!has(key)) throw ParseError(join(key), "missing required key");
        double d = 0.0;
        read(key, d);
        return d;
    }

private:
    const json& node_;
    std::string path_;
};

Vec2 parse_point(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        throw ParseError(path, "expected a point [x, y]");
    }
    return {v[0].get<double>(), v[1].get<double>()};
}

std::vector<Vec2> parse_points(const json& v, const std::string& path) {
    if (!v.is_array()) throw ParseError(path, "expected a list of points");
    std::vector<Vec2> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(parse_point(v[i], path + "[" + std::to_string(i) + "]"));
    }
    return out;
}

RegionKind parse_region_kind(const std::string& s, const std::string& path) {
    if (s == "hidden") return RegionKind::Hidden;
    if (s == "nofly") return RegionKind::NoFly;
    if (s == "building") return RegionKind::Building;
    if (s == "lawn") return RegionKind::Lawn;
    throw ParseError(path, "unknown region kind '" + s + "'");
}

WorldMap parse_map(const json& node) {
    Section sec(node, "map", {"width", "height", "origin", "regions", "sois", "stations", "criminal_starts"});
    WorldMap map;
    map.width = sec.required_number("width");
    map.height = sec.required_number("height");
    if (sec.has("origin")) map.origin = parse_point(sec.raw("origin"), "map.origin");

    auto shift = [&](std::vector<Vec2> pts) {
        for (auto& p : pts) p = map.to_internal(p);
        return pts;
    };

    if (sec.has("regions")) {
        const json& regions = sec.raw("regions");
        if (!regions.is_array()) throw ParseError("map.regions", "expected a list");
        for (std::size_t i = 0; i < regions.size(); ++i) {
            const std::string path = "map.regions[" + std::to_string(i) + "]";
            Section r(regions[i], path, {"kind", "polygon"});
            Region region;
            region.kind = parse_region_kind(r.required_string("kind"), path + ".kind");
            if (!r.has("polygon")) throw ParseError(path + ".polygon", "missing required key");
            region.polygon = shift(parse_points(r.raw("polygon"), path + ".polygon"));
            map.regions.push_back(std::move(region));
        }
    }
    if (sec.has("sois")) map.sois = shift(parse_points(sec.raw("sois"), "map.sois"));
    if (sec.has("stations")) map.stations = shift(parse_points(sec.raw("stations"), "map.stations"));
    if (sec.has("criminal_starts")) {
        map.criminal_starts = shift(parse_points(sec.raw("criminal_starts"), "map.criminal_starts"));
    }
    return map;
}

RobotSpec parse_robot(const json& node, const std::string& path) {
    Section sec(node, path, {"id", "team", "kind", "model", "v_max", "a_max", "perception_radius",
                             "safe_radius", "w_max", "w_delta"});
    RobotSpec spec;
    std::string model;
    sec.read("model", model);
    if (!model.empty()) {
        auto p = preset(model);
        if (!p) throw ParseError(path + ".model", "unknown model '" + model + "'");
        spec = *p;
    }
    spec.id = sec.required_string("id");

    const std::string team = sec.required_string("team");
    if (team == "police") spec.team = Team::Police;
    else if (team == "criminal") spec.team = Team::Criminal;
    else throw ParseError(path + ".team", "expected 'police' or 'criminal'");

    if (sec.has("kind")) {
        const std::string kind = sec.required_string("kind");
        if (kind == "uav") spec.platform = Platform::Uav;
        else if (kind == "ugv") spec.platform = Platform::Ugv;
        else throw ParseError(path + ".kind", "expected 'uav' or 'ugv'");
    } else if (model.empty()) {
        throw ParseError(path + ".kind", "missing required key (or give a model)");
    }

    const bool a_max_given = sec.has("a_max");
    sec.read("v_max", spec.v_max);
    sec.read("a_max", spec.a_max);
    sec.read("perception_radius", spec.perception_radius);
    sec.read("safe_radius", spec.safe_radius);
    sec.read("w_max", spec.w_max);
    if (sec.has("w_delta")) {
        sec.read("w_delta", spec.w_delta);
    } else if (a_max_given || model.empty()) {
        spec.w_delta = spec.a_max;
    }
    return spec;
}

void parse_episode(const json& node, EpisodeConfig& ep) {
    Section sec(node, "episode", {"horizon", "dt", "capture_distance", "min_capturers", "sticky_capture", "lawn_factor"});
    sec.read("horizon", ep.horizon);
    sec.read("dt", ep.dt);
    sec.read("capture_distance", ep.capture_distance);
    sec.read("min_capturers", ep.min_capturers);
    sec.read("sticky_capture", ep.sticky_capture);
    sec.read("lawn_factor", ep.lawn_factor);
}

void parse_reward(const json& node, RewardConfig& rw, bool& police_given, bool& criminal_given) {
    Section sec(node, "reward", {"lambda_police", "lambda_criminal", "capture_bonus", "soi_bonus", "lawn_penalty",
                                 "safety_penalty", "edge_penalty", "edge_margin", "arena_edge", "position_enabled"});
    police_given = sec.has("lambda_police");
    criminal_given = sec.has("lambda_criminal");
    sec.read("lambda_police", rw.lambda_police);
    sec.read("lambda_criminal", rw.lambda_criminal);
    sec.read("capture_bonus", rw.capture_bonus);
    sec.read("soi_bonus", rw.soi_bonus);
    sec.read("lawn_penalty", rw.lawn_penalty);
    sec.read("safety_penalty", rw.safety_penalty);
    sec.read("edge_penalty", rw.edge_penalty);
    sec.read("edge_margin", rw.edge_margin);
    sec.read("arena_edge", rw.arena_edge);
    sec.read("position_enabled", rw.position_enabled);
}

void parse_perception(const json& node, PerceptionConfig& pc) {
    Section sec(node, "perception", {"hidden_rule", "scalar_distance"});
    std::string rule;
    sec.read("hidden_rule", rule);
    if (rule == "target" || rule.empty()) pc.hidden_rule = HiddenRule::TargetInside;
    else if (rule == "observer") pc.hidden_rule = HiddenRule::ObserverInside;
    else throw ParseError("perception.hidden_rule", "expected 'target' or 'observer'");
    sec.read("scalar_distance", pc.scalar_distance);
}

void parse_train(const json& node, TrainConfig& tc) {
    Section sec(node, "train", {"gamma", "lambda", "seed", "batch", "capacity", "tau", "lr_critic", "lr_policy",
                                "noise_start", "noise_end", "episodes", "learn_police", "learn_criminal", "hidden",
                                "update_every", "checkpoint_every", "optimizer", "grad_clip", "action_reg"});
    sec.read("gamma", tc.gamma);
    sec.read("lambda", tc.lambda);
    sec.read("seed", tc.seed);
    sec.read("batch", tc.batch);
    sec.read("capacity", tc.capacity);
    sec.read("tau", tc.tau);
    sec.read("lr_critic", tc.lr_critic);
    sec.read("lr_policy", tc.lr_policy);
    sec.read("noise_start", tc.noise_start);
    sec.read("noise_end", tc.noise_end);
    sec.read("episodes", tc.episodes);
    sec.read("learn_police", tc.learn_police);
    sec.read("learn_criminal", tc.learn_criminal);
    sec.read("update_every", tc.update_every);
    sec.read("checkpoint_every", tc.checkpoint_every);
    sec.read("grad_clip", tc.grad_clip);
    sec.read("action_reg", tc.action_reg);
    if (sec.has("hidden")) {
        const json& h = sec.raw("hidden");
        if (!h.is_array()) throw ParseError("train.hidden", "expected a list of layer widths");
        tc.hidden.clear();
        for (const auto& w : h) {
            if (!w.is_number_integer()) throw ParseError("train.hidden", "expected integer widths");
            tc.hidden.push_back(w.get<int>());
        }
    }
    std::string opt;
    sec.read("optimizer", opt);
    if (opt == "sgd" || opt.empty()) tc.optimizer = OptimizerKind::Sgd;
    else if (opt == "adam") tc.optimizer = OptimizerKind::Adam;
    else throw ParseError("train.optimizer", "expected 'sgd' or 'adam'");
}

void require(bool ok, const char* rule, const std::string& what) {
    if (!ok) throw ValidationError(rule, what);
}

bool finite_point(Vec2 p) { return is_finite(p); }

}  // namespace

Scenario load_scenario(const std::string& source) {
    json doc;
    try {
        doc = json::parse(source);
    } catch (const json::parse_error& e) {
        throw ParseError("<document>", e.what());
    }
    Section root(doc, "", {"map", "robots", "episode", "reward", "perception", "train"});

    Scenario sc;
    if (!root.has("map")) throw ParseError("map", "missing required key");
    sc.map = parse_map(root.raw("map"));

    if (!root.has("robots")) throw ParseError("robots", "missing required key");
    const json& robots = root.raw("robots");
    if (!robots.is_array()) throw ParseError("robots", "expected a list");
    for (std::size_t i = 0; i < robots.size(); ++i) {
        sc.roster.push_back(parse_robot(robots[i], "robots[" + std::to_string(i) + "]"));
    }

    if (root.has("episode")) parse_episode(root.raw("episode"), sc.episode);
    bool police_lambda = false;
    bool criminal_lambda = false;
    if (root.has("reward")) parse_reward(root.raw("reward"), sc.reward, police_lambda, criminal_lambda);
    if (root.has("perception")) parse_perception(root.raw("perception"), sc.perception);
    if (root.has("train")) parse_train(root.raw("train"), sc.train);

    // train.lambda supplies the shaping magnitude unless a team-specific value is given.
    if (!police_lambda) sc.reward.lambda_police = -sc.train.lambda;
    if (!criminal_lambda) sc.reward.lambda_criminal = sc.train.lambda;

    validate(sc);
    return sc;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("<file>", "cannot open " + path.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return load_scenario(ss.str());
}

void validate(const Scenario& sc) {
    const WorldMap& m = sc.map;
    require(std::isfinite(m.width) && std::isfinite(m.height) && m.width > 0.0 && m.height > 0.0, "map.extent",
            "width and height must be positive");
    require(finite_point(m.origin), "map.origin", "origin must be finite");

    for (std::size_t i = 0; i < m.regions.size(); ++i) {
        const auto& poly = m.regions[i].polygon;
        const std::string where = "region " + std::to_string(i);
        require(poly.size() >= 3, "region.vertices", where + " needs at least 3 vertices");
        for (const Vec2 v : poly) {
            require(finite_point(v) && m.in_arena(v), "region.bounds", where + " has a vertex outside the arena");
        }
        require(is_simple(poly), "region.simple", where + " is self-intersecting");
    }
    for (const Vec2 s : m.sois) {
        require(finite_point(s) && m.in_arena(s), "soi.bounds", "SoI outside the arena");
        require(!m.in_region(RegionKind::Building, s), "soi.building", "SoI inside a building region");
    }
    for (const Vec2 s : m.stations) {
        require(finite_point(s) && m.in_arena(s), "station.bounds", "station outside the arena");
        require(!m.in_region(RegionKind::Building, s) && !m.in_region(RegionKind::Hidden, s), "station.region",
                "station inside a building or hidden region");
    }
    for (const Vec2 s : m.criminal_starts) {
        require(finite_point(s) && m.in_arena(s), "criminal_start.bounds", "criminal start outside the arena");
        require(!m.in_region(RegionKind::Building, s), "criminal_start.building", "criminal start inside a building");
    }

    require(sc.count(Team::Police) >= 1, "roster.police", "roster needs at least one police robot");
    require(sc.count(Team::Criminal) >= 1, "roster.criminal", "roster needs at least one criminal robot");
    std::set<std::string> ids;
    for (const auto& r : sc.roster) {
        require(!r.id.empty(), "robot.id", "robot id must be non-empty");
        require(ids.insert(r.id).second, "robot.id", "duplicate robot id '" + r.id + "'");
        require(r.v_max > 0.0 && std::isfinite(r.v_max), "robot.v_max", r.id + ": v_max must be positive");
        require(r.a_max > 0.0 && std::isfinite(r.a_max), "robot.a_max", r.id + ": a_max must be positive");
        require(r.perception_radius > 0.0 && std::isfinite(r.perception_radius), "robot.perception_radius",
                r.id + ": perception_radius must be positive");
        require(r.safe_radius >= 0.0 && std::isfinite(r.safe_radius), "robot.safe_radius",
                r.id + ": safe_radius must be non-negative");
        require(r.w_max > 0.0 && r.w_delta > 0.0, "robot.angular", r.id + ": angular bounds must be positive");
    }

    const EpisodeConfig& ep = sc.episode;
    require(ep.horizon >= 1, "episode.horizon", "horizon must be at least 1");
    require(ep.dt > 0.0 && std::isfinite(ep.dt), "episode.dt", "dt must be positive");
    require(ep.capture_distance > 0.0 && std::isfinite(ep.capture_distance), "episode.capture_distance",
            "capture_distance must be positive");
    require(ep.min_capturers >= 1, "episode.min_capturers", "min_capturers must be at least 1");
    require(ep.lawn_factor > 0.0 && ep.lawn_factor <= 1.0, "episode.lawn_factor", "lawn_factor must be in (0, 1]");

    const TrainConfig& tc = sc.train;
    require(tc.gamma >= 0.0 && tc.gamma <= 1.0, "train.gamma", "gamma must be in [0, 1]");
    require(std::isfinite(tc.lambda), "train.lambda", "lambda must be finite");
    require(tc.batch >= 1, "train.batch", "batch must be at least 1");
    require(tc.capacity >= tc.batch, "train.capacity", "capacity must be at least the batch size");
    require(tc.tau >= 0.0 && tc.tau <= 1.0, "train.tau", "tau must be in [0, 1]");
    require(tc.lr_critic >= 0.0 && tc.lr_policy >= 0.0, "train.lr", "learning rates must be non-negative");
    require(tc.noise_start >= 0.0 && tc.noise_end >= 0.0, "train.noise", "noise scales must be non-negative");
    require(tc.episodes >= 0, "train.episodes", "episodes must be non-negative");
    require(!tc.hidden.empty() && std::all_of(tc.hidden.begin(), tc.hidden.end(), [](int w) { return w > 0; }),
            "train.hidden", "hidden layer widths must be positive");
    require(tc.update_every >= 1, "train.update_every", "update_every must be at least 1");
    require(tc.checkpoint_every >= 0, "train.checkpoint_every", "checkpoint_every must be non-negative");
    require(tc.grad_clip >= 0.0, "train.grad_clip", "grad_clip must be non-negative");
    require(tc.action_reg >= 0.0, "train.action_reg", "action_reg must be non-negative");
}

namespace {

json point_json(Vec2 p) { return json::array({p.x, p.y}); }

json points_json(const std::vector<Vec2>& pts) {
    json arr = json::array();
    for (const Vec2 p : pts) arr.push_back(point_json(p));
    return arr;
}

}  // namespace

// Geometry is written in the internal frame with a zero origin, so reloading
// reproduces the internal coordinates exactly.
json to_json(const Scenario& sc) {
    json map = {{"width", sc.map.width},
                {"height", sc.map.height},
                {"origin", point_json({0.0, 0.0})},
                {"sois", points_json(sc.map.sois)},
                {"stations", points_json(sc.map.stations)}};
    json regions = json::array();
    for (const auto& r : sc.map.regions) {
        regions.push_back({{"kind", std::string(to_string(r.kind))}, {"polygon", points_json(r.polygon)}});
    }
    map["regions"] = std::move(regions);
    if (!sc.map.criminal_starts.empty()) map["criminal_starts"] = points_json(sc.map.criminal_starts);

    json robots = json::array();
    for (const auto& r : sc.roster) {
        json jr = {{"id", r.id},
                   {"team", std::string(to_string(r.team))},
                   {"kind", std::string(to_string(r.platform))},
                   {"v_max", r.v_max},
                   {"a_max", r.a_max},
                   {"perception_radius", r.perception_radius},
                   {"safe_radius", r.safe_radius},
                   {"w_max", r.w_max},
                   {"w_delta", r.w_delta}};
        if (!r.model.empty()) jr["model"] = r.model;
        robots.push_back(std::move(jr));
    }

    const auto& ep = sc.episode;
    const auto& rw = sc.reward;
    const auto& tc = sc.train;
    return {
        {"map", std::move(map)},
        {"robots", std::move(robots)},
        {"episode",
         {{"horizon", ep.horizon},
          {"dt", ep.dt},
          {"capture_distance", ep.capture_distance},
          {"min_capturers", ep.min_capturers},
          {"sticky_capture", ep.sticky_capture},
          {"lawn_factor", ep.lawn_factor}}},
        {"reward",
         {{"lambda_police", rw.lambda_police},
          {"lambda_criminal", rw.lambda_criminal},
          {"capture_bonus", rw.capture_bonus},
          {"soi_bonus", rw.soi_bonus},
          {"lawn_penalty", rw.lawn_penalty},
          {"safety_penalty", rw.safety_penalty},
          {"edge_penalty", rw.edge_penalty},
          {"edge_margin", rw.edge_margin},
          {"arena_edge", rw.arena_edge},
          {"position_enabled", rw.position_enabled}}},
        {"perception",
         {{"hidden_rule", sc.perception.hidden_rule == HiddenRule::TargetInside ? "target" : "observer"},
          {"scalar_distance", sc.perception.scalar_distance}}},
        {"train",
         {{"gamma", tc.gamma},
          {"lambda", tc.lambda},
          {"seed", tc.seed},
          {"batch", tc.batch},
          {"capacity", tc.capacity},
          {"tau", tc.tau},
          {"lr_critic", tc.lr_critic},
          {"lr_policy", tc.lr_policy},
          {"noise_start", tc.noise_start},
          {"noise_end", tc.noise_end},
          {"episodes", tc.episodes},
          {"learn_police", tc.learn_police},
          {"learn_criminal", tc.learn_criminal},
          {"hidden", tc.hidden},
          {"update_every", tc.update_every},
          {"checkpoint_every", tc.checkpoint_every},
          {"optimizer", tc.optimizer == OptimizerKind::Sgd ? "sgd" : "adam"},
          {"grad_clip", tc.grad_clip},
          {"action_reg", tc.action_reg}}},
    };
}

std::string serialize_scenario(const Scenario& scenario) { return to_json(scenario).dump(2); }

Scenario ablate_proficiency(Scenario scenario) {
    scenario.reward.position_enabled = false;
    double total = 0.0;
    for (const auto& r : scenario.roster) total += r.perception_radius;
    const double shared = total / static_cast<double>(scenario.roster.size());
    for (auto& r : scenario.roster) r.perception_radius = shared;
    return scenario;
}

}  // namespace pursuit
