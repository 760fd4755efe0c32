#include "dribbleforge/documents.hpp"

#include <fmt/format.h>

#include <fstream>
#include <sstream>

namespace dribbleforge {

namespace {

constexpr std::string_view kAtlasFormat = "dribbleforge-atlas/1";

[[noreturn]] void invalid(const std::string& msg, std::optional<std::size_t> node = std::nullopt,
                          std::string field = {})
{
    throw Error(Errc::InvalidDocument, msg, node, std::move(field));
}

std::string where(std::optional<std::size_t> node)
{
    return node ? "node " + std::to_string(*node) + ": " : std::string{};
}

void require_object(const Json& doc, std::string_view what)
{
    if (!doc.is_object()) invalid(std::string(what) + " must be a JSON object");
}

const Json& member(const Json& obj, std::string_view key, std::optional<std::size_t> node = std::nullopt)
{
    const auto it = obj.find(key);
    if (it == obj.end()) invalid(where(node) + "missing field '" + std::string(key) + "'", node, std::string(key));
    return *it;
}

double number(const Json& obj, std::string_view key, std::optional<std::size_t> node = std::nullopt)
{
    const Json& v = member(obj, key, node);
    if (!v.is_number()) invalid(where(node) + "field '" + std::string(key) + "' must be a number", node, std::string(key));
    return v.get<double>();
}

std::uint64_t unsigned_number(const Json& obj, std::string_view key)
{
    const Json& v = member(obj, key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        invalid("field '" + std::string(key) + "' must be a non-negative integer", std::nullopt, std::string(key));
    }
    return v.get<std::uint64_t>();
}

void read_optional(const Json& obj, std::string_view key, double& out)
{
    if (obj.contains(key)) out = number(obj, key);
}

void read_optional(const Json& obj, std::string_view key, std::size_t& out)
{
    if (obj.contains(key)) out = static_cast<std::size_t>(unsigned_number(obj, key));
}

std::array<double, 2> range(const Json& obj, std::string_view key)
{
    const Json& v = member(obj, key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        invalid("field '" + std::string(key) + "' must be a [lo, hi] pair of numbers", std::nullopt, std::string(key));
    }
    return {v[0].get<double>(), v[1].get<double>()};
}

void check_format(const Json& doc, std::string_view expected, bool required)
{
    const auto it = doc.find("format");
    if (it == doc.end()) {
        if (required) invalid("missing field 'format'", std::nullopt, "format");
        return;
    }
    if (!it->is_string() || it->get<std::string>() != expected) {
        invalid("format must be \"" + std::string(expected) + "\"", std::nullopt, "format");
    }
}

Json point_to_json(Point2 p) { return {{"x", p.x}, {"y", p.y}}; }

Point2 point_from_json(const Json& doc, std::string_view what)
{
    if (!doc.is_object()) invalid(std::string(what) + " must be an object with x and y", std::nullopt, std::string(what));
    return {number(doc, "x"), number(doc, "y")};
}

Json metrics_to_json(const TraceMetrics& m)
{
    const auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
    return {{"min_obstacle_distance", m.min_obstacle_distance},
            {"path_length", m.path_length},
            {"finish_time", opt(m.finish_time)},
            {"mean_speed_before", opt(m.mean_speed_before)},
            {"mean_speed_after", opt(m.mean_speed_after)},
            {"fallback_used", m.fallback_used}};
}

} // namespace

Json limits_to_json(const ParamLimits& limits)
{
    return {{"max_acceleration", limits.max_acceleration},
            {"body_dir_range", limits.body_dir_range},
            {"ball_dir_range", limits.ball_dir_range}};
}

ParamLimits limits_from_json(const Json& doc)
{
    require_object(doc, "limits");
    ParamLimits limits;
    read_optional(doc, "max_acceleration", limits.max_acceleration);
    if (doc.contains("body_dir_range")) limits.body_dir_range = range(doc, "body_dir_range");
    if (doc.contains("ball_dir_range")) limits.ball_dir_range = range(doc, "ball_dir_range");
    return limits;
}

Json plan_to_json(const TrajectoryPlan& plan)
{
    Json nodes = Json::array();
    for (const PlanNode& n : plan.nodes()) {
        nodes.push_back({{"x", n.position.x},
                         {"y", n.position.y},
                         {"acceleration", n.params.acceleration},
                         {"body_dir", n.params.body_dir},
                         {"ball_dir", n.params.ball_dir}});
    }
    return {{"format", kPlanFormat}, {"limits", limits_to_json(plan.limits())}, {"nodes", std::move(nodes)}};
}

TrajectoryPlan plan_from_json(const Json& doc)
{
    require_object(doc, "plan document");
    check_format(doc, kPlanFormat, true);
    const ParamLimits limits = doc.contains("limits") ? limits_from_json(doc["limits"]) : ParamLimits{};
    const Json& nodes = member(doc, "nodes");
    if (!nodes.is_array()) invalid("field 'nodes' must be an array", std::nullopt, "nodes");

    std::vector<PlanNode> out;
    out.reserve(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const Json& n = nodes[i];
        if (!n.is_object()) invalid(where(i) + "must be an object", i);
        out.push_back({{number(n, "x", i), number(n, "y", i)},
                       {number(n, "acceleration", i), number(n, "body_dir", i), number(n, "ball_dir", i)}});
    }
    return build_plan(std::move(out), limits);
}

Json ga_to_json(const GaConfig& cfg)
{
    return {{"population_size", cfg.population_size},
            {"generation_count", cfg.generation_count},
            {"crossover_probability", cfg.crossover_probability},
            {"parent_selection_probability", cfg.parent_selection_probability},
            {"selection_method", to_string(cfg.selection_method)},
            {"mutation_coefficient", cfg.mutation_coefficient},
            {"initial_mutation_coefficient", cfg.initial_mutation_coefficient},
            {"rng_seed", cfg.rng_seed}};
}

GaConfig ga_from_json(const Json& doc)
{
    require_object(doc, "ga config");
    GaConfig cfg;
    read_optional(doc, "population_size", cfg.population_size);
    read_optional(doc, "generation_count", cfg.generation_count);
    read_optional(doc, "crossover_probability", cfg.crossover_probability);
    read_optional(doc, "parent_selection_probability", cfg.parent_selection_probability);
    read_optional(doc, "mutation_coefficient", cfg.mutation_coefficient);
    read_optional(doc, "initial_mutation_coefficient", cfg.initial_mutation_coefficient);
    if (doc.contains("rng_seed")) cfg.rng_seed = unsigned_number(doc, "rng_seed");
    if (doc.contains("selection_method")) {
        const Json& m = doc["selection_method"];
        const auto parsed = m.is_string() ? parse_selection_method(m.get<std::string>()) : std::nullopt;
        if (!parsed) {
            invalid("selection_method must be one of roulette, rank, sus, tournament", std::nullopt,
                    "selection_method");
        }
        cfg.selection_method = *parsed;
    }
    cfg.validate();
    return cfg;
}

Json fitness_to_json(const FitnessConfig& cfg)
{
    return {{"alpha_user", cfg.alpha_user}, {"beta_user", cfg.beta_user}, {"rho", cfg.rho}};
}

FitnessConfig fitness_from_json(const Json& doc)
{
    require_object(doc, "fitness config");
    FitnessConfig cfg;
    read_optional(doc, "alpha_user", cfg.alpha_user);
    read_optional(doc, "beta_user", cfg.beta_user);
    read_optional(doc, "rho", cfg.rho);
    cfg.validate();
    return cfg;
}

Json sim_to_json(const SimConfig& cfg)
{
    return {{"dt", cfg.dt},
            {"max_steps", cfg.max_steps},
            {"max_speed", cfg.max_speed},
            {"kickable_radius", cfg.kickable_radius},
            {"finish_x", cfg.finish_x}};
}

SimConfig sim_from_json(const Json& doc)
{
    require_object(doc, "sim config");
    SimConfig cfg;
    read_optional(doc, "dt", cfg.dt);
    read_optional(doc, "max_steps", cfg.max_steps);
    read_optional(doc, "max_speed", cfg.max_speed);
    read_optional(doc, "kickable_radius", cfg.kickable_radius);
    read_optional(doc, "finish_x", cfg.finish_x);
    cfg.validate();
    return cfg;
}

Json atlas_to_json(const FieldAtlas& atlas)
{
    Json anchors = Json::array();
    for (const AnchorPlan& a : atlas.anchors()) {
        anchors.push_back({{"obstacle_position", point_to_json(a.obstacle_position)}, {"plan", plan_to_json(a.plan)}});
    }
    return {{"format", kAtlasFormat}, {"goal", point_to_json(atlas.goal())}, {"anchors", std::move(anchors)}};
}

FieldAtlas atlas_from_json(const Json& doc)
{
    require_object(doc, "atlas document");
    check_format(doc, kAtlasFormat, false);
    const Point2 goal = point_from_json(member(doc, "goal"), "goal");
    const Json& anchors = member(doc, "anchors");
    if (!anchors.is_array()) invalid("field 'anchors' must be an array", std::nullopt, "anchors");
    std::vector<AnchorPlan> out;
    out.reserve(anchors.size());
    for (std::size_t i = 0; i < anchors.size(); ++i) {
        const Json& a = anchors[i];
        if (!a.is_object()) invalid("anchor " + std::to_string(i) + " must be an object");
        try {
            out.push_back({point_from_json(member(a, "obstacle_position"), "obstacle_position"),
                           plan_from_json(member(a, "plan"))});
        } catch (const Error& e) {
            throw Error(e.code(), "anchor " + std::to_string(i) + ": " + e.what(), e.node(), e.field());
        }
    }
    return build_atlas(std::move(out), goal);
}

Json history_to_json(std::span<const GenerationStats> history)
{
    Json out = Json::array();
    for (const GenerationStats& g : history) {
        out.push_back({{"generation", g.generation}, {"best", g.best}, {"mean", g.mean}, {"worst", g.worst}});
    }
    return out;
}

Json report_to_json(const EvolutionResult& result, const GaConfig& ga, const FitnessConfig& fit)
{
    return {{"format", kReportFormat},
            {"ga", ga_to_json(ga)},
            {"fitness", fitness_to_json(fit)},
            {"rng_seed", result.rng_seed},
            {"cancelled", result.cancelled},
            {"history", history_to_json(result.history)},
            {"best_fitness", result.best_fitness},
            {"best_plan", plan_to_json(result.best_plan)}};
}

Json trace_to_json(const Trace& trace, const TraceMetrics* metrics)
{
    Json rows = Json::array();
    for (std::size_t i = 0; i < trace.states.size(); ++i) {
        const AgentState& s = trace.states[i];
        const NodeParams& c = trace.commands[i];
        rows.push_back({{"t", s.time},
                        {"x", s.position.x},
                        {"y", s.position.y},
                        {"vx", s.velocity.x},
                        {"vy", s.velocity.y},
                        {"accel_cmd", c.acceleration},
                        {"body_dir_cmd", c.body_dir},
                        {"ball_dir_cmd", c.ball_dir}});
    }
    Json out{{"termination", to_string(trace.termination)},
             {"fallback_used", trace.fallback_used},
             {"states", std::move(rows)}};
    if (metrics) out["metrics"] = metrics_to_json(*metrics);
    return out;
}

Json field_to_json(const FieldGrid& grid)
{
    Json samples = Json::array();
    for (const FieldSample& s : grid.samples) {
        samples.push_back({{"x", s.x}, {"y", s.y}, {"accel", s.accel}, {"body_dir", s.body_dir}, {"speed", s.speed}});
    }
    return {{"nx", grid.nx}, {"ny", grid.ny}, {"samples", std::move(samples)}};
}

Json error_to_json(const Error& e)
{
    Json out{{"error", to_string(e.code())}, {"message", e.what()}};
    if (e.node()) out["node"] = *e.node();
    if (!e.field().empty()) out["field"] = e.field();
    return out;
}

std::string history_csv(std::span<const GenerationStats> history)
{
    std::string out = "generation,best,mean,worst\n";
    for (const GenerationStats& g : history) out += fmt::format("{},{},{},{}\n", g.generation, g.best, g.mean, g.worst);
    return out;
}

std::string trace_csv(const Trace& trace)
{
    std::string out = "t,x,y,vx,vy,accel_cmd,body_dir_cmd,ball_dir_cmd\n";
    for (std::size_t i = 0; i < trace.states.size(); ++i) {
        const AgentState& s = trace.states[i];
        const NodeParams& c = trace.commands[i];
        out += fmt::format("{},{},{},{},{},{},{},{}\n", s.time, s.position.x, s.position.y, s.velocity.x, s.velocity.y,
                           c.acceleration, c.body_dir, c.ball_dir);
    }
    return out;
}

std::string field_csv(const FieldGrid& grid)
{
    std::string out = "x,y,accel,body_dir,speed\n";
    for (const FieldSample& s : grid.samples) {
        out += fmt::format("{},{},{},{},{}\n", s.x, s.y, s.accel, s.body_dir, s.speed);
    }
    return out;
}

Json parse_json(std::string_view text)
{
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        invalid(std::string("malformed JSON: ") + e.what());
    }
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) invalid("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Json read_json_file(const std::filesystem::path& path) { return parse_json(read_text_file(path)); }

void write_text_file(const std::filesystem::path& path, std::string_view text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) invalid("cannot write " + path.string());
    out << text;
    if (!out) invalid("failed writing " + path.string());
}

} // namespace dribbleforge
