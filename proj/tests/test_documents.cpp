#include <doctest.h>

#include "dribbleforge/documents.hpp"
#include "support.hpp"

#include <algorithm>
#include <cstring>
#include <random>
#include <sstream>

using namespace dribbleforge;
using support::error_code_of;
using support::thrown_error;

namespace {

TrajectoryPlan seed_fixture() { return plan_from_json(read_json_file(support::fixture("seed_plan.json"))); }

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

std::vector<std::string> lines(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

} // namespace

TEST_CASE("plan documents round-trip bit-exactly")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> pos(-20.0, 20.0), acc(0.0, 3.0), dir(-1.5, 1.5);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<PlanNode> nodes;
        for (int i = 0; i < 12; ++i) nodes.push_back({{pos(rng), pos(rng)}, {acc(rng), dir(rng), dir(rng)}});
        const TrajectoryPlan plan = build_plan(nodes);
        const std::string text = plan_to_json(plan).dump();
        const TrajectoryPlan back = plan_from_json(parse_json(text));
        REQUIRE(back.size() == plan.size());
        for (std::size_t i = 0; i < plan.size(); ++i) {
            const PlanNode& a = plan.nodes()[i];
            const PlanNode& b = back.nodes()[i];
            CHECK(same_bits(a.position.x, b.position.x));
            CHECK(same_bits(a.position.y, b.position.y));
            CHECK(same_bits(a.params.acceleration, b.params.acceleration));
            CHECK(same_bits(a.params.body_dir, b.params.body_dir));
            CHECK(same_bits(a.params.ball_dir, b.params.ball_dir));
        }
        CHECK(std::ranges::equal(back.triangulation().triangles(), plan.triangulation().triangles()));
        CHECK(plan_to_json(back).dump() == text);
    }
}

TEST_CASE("the seed fixture is a valid plan")
{
    const TrajectoryPlan plan = seed_fixture();
    CHECK(plan.size() == 25);
    CHECK(plan.triangulation().triangle_count() == 42);
}

TEST_CASE("invalid plan documents name the offending node and field")
{
    const Error range = thrown_error([] { plan_from_json(read_json_file(support::fixture("invalid_plan.json"))); });
    CHECK(range.code() == Errc::ParamOutOfRange);
    CHECK(range.node() == 4u);
    CHECK(range.field() == "acceleration");
    const Json rendered = error_to_json(range);
    CHECK(rendered["error"] == "ParamOutOfRange");
    CHECK(rendered["node"] == 4);
    CHECK(rendered["field"] == "acceleration");

    Json doc = plan_to_json(seed_fixture());
    doc["nodes"][3].erase("body_dir");
    const Error missing = thrown_error([&] { plan_from_json(doc); });
    CHECK(missing.code() == Errc::InvalidDocument);
    CHECK(missing.node() == 3u);
    CHECK(missing.field() == "body_dir");

    doc = plan_to_json(seed_fixture());
    doc["nodes"][2]["x"] = "left";
    CHECK(thrown_error([&] { plan_from_json(doc); }).field() == "x");

    doc = plan_to_json(seed_fixture());
    doc["format"] = "something-else/2";
    CHECK(thrown_error([&] { plan_from_json(doc); }).field() == "format");
    doc.erase("format");
    CHECK(error_code_of([&] { plan_from_json(doc); }) == Errc::InvalidDocument);

    doc = plan_to_json(seed_fixture());
    doc["nodes"][5]["x"] = doc["nodes"][1]["x"];
    doc["nodes"][5]["y"] = doc["nodes"][1]["y"];
    const Error dup = thrown_error([&] { plan_from_json(doc); });
    CHECK(dup.code() == Errc::DegenerateLayout);
    CHECK(dup.node() == 5u);
    CHECK(dup.field() == "position");

    doc = plan_to_json(seed_fixture());
    doc["nodes"] = Json::array({doc["nodes"][0], doc["nodes"][1]});
    CHECK(error_code_of([&] { plan_from_json(doc); }) == Errc::TooFewNodes);

    CHECK(error_code_of([] { parse_json("{\"nodes\": ["); }) == Errc::InvalidDocument);
    CHECK(error_code_of([] { plan_from_json(Json::array()); }) == Errc::InvalidDocument);
}

TEST_CASE("unknown plan fields are ignored")
{
    Json doc = plan_to_json(seed_fixture());
    doc["editor"] = {{"zoom", 2}};
    doc["nodes"][0]["label"] = "corner";
    CHECK(plan_from_json(doc) == seed_fixture());
}

TEST_CASE("ga and fitness configs parse with defaults and validation")
{
    const GaConfig ga = ga_from_json(read_json_file(support::fixture("ga_config.json")));
    CHECK(ga.population_size == 40);
    CHECK(ga.generation_count == 1000);
    CHECK(ga.selection_method == SelectionMethod::Roulette);
    CHECK(ga.rng_seed == 1u);
    CHECK(ga_to_json(ga_from_json(ga_to_json(ga))) == ga_to_json(ga));

    const GaConfig partial = ga_from_json({{"selection_method", "tournament"}, {"rng_seed", 99}});
    CHECK(partial.selection_method == SelectionMethod::Tournament);
    CHECK(partial.population_size == GaConfig{}.population_size);
    CHECK(partial.rng_seed == 99u);

    CHECK(thrown_error([] { ga_from_json({{"selection_method", "lottery"}}); }).field() == "selection_method");
    CHECK(thrown_error([] { ga_from_json({{"population_size", -3}}); }).field() == "population_size");
    CHECK(thrown_error([] { ga_from_json({{"crossover_probability", 1.5}}); }).field() == "crossover_probability");
    CHECK(thrown_error([] { ga_from_json({{"population_size", 1}}); }).code() == Errc::InvalidConfig);

    const FitnessConfig fit = fitness_from_json(read_json_file(support::fixture("fitness_config.json")));
    CHECK(fit.alpha_user == 0.66);
    CHECK(fit.beta_user == 0.33);
    CHECK(fitness_from_json(Json::object()).rho == FitnessConfig{}.rho);
    CHECK(thrown_error([] { fitness_from_json({{"rho", 0.0}}); }).field() == "rho");

    const SimConfig sim = sim_from_json({{"dt", 0.05}});
    CHECK(sim.dt == 0.05);
    CHECK(sim.max_steps == SimConfig{}.max_steps);
    CHECK(thrown_error([] { sim_from_json({{"max_speed", -1.0}}); }).field() == "max_speed");
}

TEST_CASE("atlas documents round-trip")
{
    const Json doc = read_json_file(support::fixture("atlas_3.json"));
    const FieldAtlas atlas = atlas_from_json(doc);
    CHECK(atlas.anchors().size() == 3);
    CHECK(atlas.goal() == Point2{52.5, 0.0});
    const std::string text = atlas_to_json(atlas).dump();
    const FieldAtlas back = atlas_from_json(parse_json(text));
    CHECK(atlas_to_json(back).dump() == text);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(back.anchors()[i].obstacle_position == atlas.anchors()[i].obstacle_position);
        CHECK(back.anchors()[i].plan == atlas.anchors()[i].plan);
    }

    Json bad = doc;
    bad["anchors"][1]["plan"]["nodes"][2]["acceleration"] = -1.0;
    const Error e = thrown_error([&] { atlas_from_json(bad); });
    CHECK(e.code() == Errc::ParamOutOfRange);
    CHECK(e.node() == 2u);
    CHECK(std::string(e.what()).find("anchor 1") != std::string::npos);

    bad = doc;
    bad.erase("goal");
    CHECK(thrown_error([&] { atlas_from_json(bad); }).field() == "goal");
    bad = doc;
    bad["anchors"] = Json::array();
    CHECK(error_code_of([&] { atlas_from_json(bad); }) == Errc::EmptyAnchors);
}

TEST_CASE("reports carry config, history and best plan")
{
    GaConfig ga;
    ga.generation_count = 3;
    ga.rng_seed = 5;
    const FitnessConfig fit;
    const EvolutionResult r = evolve(seed_fixture(), ga, fit);
    const Json doc = report_to_json(r, ga, fit);
    CHECK(doc["format"] == kReportFormat);
    CHECK(doc["rng_seed"] == 5);
    CHECK(doc["cancelled"] == false);
    CHECK(doc["history"].size() == 4);
    CHECK(doc["history"][3]["generation"] == 3);
    CHECK(doc["best_fitness"].get<double>() == r.best_fitness);
    CHECK(plan_from_json(doc["best_plan"]) == r.best_plan);
    CHECK(ga_from_json(doc["ga"]).rng_seed == 5u);
}

TEST_CASE("csv writers emit a header and one row per record")
{
    std::vector<GenerationStats> hist{{0, 3.0, 2.0, 1.0}, {1, 3.5, 2.25, 1.0}};
    const auto h = lines(history_csv(hist));
    REQUIRE(h.size() == 3);
    CHECK(h[0] == "generation,best,mean,worst");
    CHECK(h[2] == "1,3.5,2.25,1");

    const Trace tr = simulate(seed_fixture(), {-12.0, 0.0}, {4.0, 0.0});
    const auto t = lines(trace_csv(tr));
    CHECK(t.size() == tr.states.size() + 1);
    CHECK(t[0] == "t,x,y,vx,vy,accel_cmd,body_dir_cmd,ball_dir_cmd");
    CHECK(t[1].rfind("0,-12,0,4,0,", 0) == 0);

    const Json tj = trace_to_json(tr);
    CHECK(tj["states"].size() == tr.states.size());
    CHECK_FALSE(tj.contains("metrics"));
    const TraceMetrics m = trace_metrics(tr);
    CHECK(trace_to_json(tr, &m)["metrics"]["min_obstacle_distance"].get<double>() == m.min_obstacle_distance);

    const FieldGrid grid = sample_field(seed_fixture(), 3, 2);
    const auto f = lines(field_csv(grid));
    CHECK(f.size() == 7);
    CHECK(f[0] == "x,y,accel,body_dir,speed");
    CHECK(field_to_json(grid)["samples"].size() == 6);
}

TEST_CASE("csv numbers parse back to the same doubles")
{
    const Trace tr = simulate(seed_fixture(), {-12.0, 0.3}, {4.0, 0.0});
    const auto rows = lines(trace_csv(tr));
    for (std::size_t i = 1; i < rows.size(); ++i) {
        std::istringstream in(rows[i]);
        std::string cell;
        std::vector<double> v;
        while (std::getline(in, cell, ',')) v.push_back(std::stod(cell));
        REQUIRE(v.size() == 8);
        const AgentState& s = tr.states[i - 1];
        CHECK(same_bits(v[1], s.position.x));
        CHECK(same_bits(v[2], s.position.y));
        CHECK(same_bits(v[3], s.velocity.x));
    }
}

TEST_CASE("file helpers round-trip text and report missing files")
{
    const auto path = std::filesystem::temp_directory_path() / "dribbleforge_doc_test.json";
    write_text_file(path, plan_to_json(seed_fixture()).dump(2));
    CHECK(plan_from_json(read_json_file(path)) == seed_fixture());
    std::filesystem::remove(path);
    CHECK(error_code_of([&] { read_text_file(path); }) == Errc::InvalidDocument);
}
