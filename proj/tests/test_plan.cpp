#include <doctest.h>

#include "dribbleforge/documents.hpp"
#include "dribbleforge/plan.hpp"
#include "oracles.hpp"
#include "support.hpp"

#include <cmath>
#include <random>
#include <set>

using namespace dribbleforge;
using support::error_code_of;

namespace {

TrajectoryPlan seed_fixture() { return plan_from_json(read_json_file(support::fixture("seed_plan.json"))); }

std::set<Triangle> triangle_set(const TrajectoryPlan& plan)
{
    return {plan.triangulation().triangles().begin(), plan.triangulation().triangles().end()};
}

std::vector<PlanNode> triangle_nodes()
{
    return {{{0, 0}, {1.0, 0.1, 0.0}}, {{4, 0}, {2.0, 0.2, 0.1}}, {{0, 4}, {3.0, -0.3, 0.2}}};
}

} // namespace

TEST_CASE("three valid nodes build a one-triangle plan")
{
    const TrajectoryPlan plan = build_plan(triangle_nodes());
    CHECK(plan.size() == 3);
    CHECK(plan.triangulation().triangle_count() == 1);
    CHECK(plan.positions() == std::vector<Point2>{{0, 0}, {4, 0}, {0, 4}});
}

TEST_CASE("build_plan reports the node and field that break the limits")
{
    auto nodes = triangle_nodes();
    nodes[1].params.acceleration = 5.0;
    const Error e = support::thrown_error([&] { build_plan(nodes); });
    CHECK(e.code() == Errc::ParamOutOfRange);
    CHECK(e.node() == 1u);
    CHECK(e.field() == "acceleration");

    nodes = triangle_nodes();
    nodes[2].params.ball_dir = 1.6;
    const Error ball = support::thrown_error([&] { build_plan(nodes); });
    CHECK(ball.node() == 2u);
    CHECK(ball.field() == "ball_dir");

    nodes = triangle_nodes();
    nodes[0].params.body_dir = -1.6;
    CHECK(support::thrown_error([&] { build_plan(nodes); }).field() == "body_dir");
}

TEST_CASE("build_plan rejects layouts it cannot triangulate")
{
    auto nodes = triangle_nodes();
    nodes.pop_back();
    CHECK(error_code_of([&] { build_plan(nodes); }) == Errc::TooFewNodes);

    const std::vector<PlanNode> collinear{{{0, 0}, {}}, {{1, 1}, {}}, {{2, 2}, {}}};
    CHECK(error_code_of([&] { build_plan(collinear); }) == Errc::DegenerateLayout);

    nodes = triangle_nodes();
    nodes.push_back({{4.0 + 1e-7, 0.0}, {}});
    const Error dup = support::thrown_error([&] { build_plan(nodes); });
    CHECK(dup.code() == Errc::DegenerateLayout);
    CHECK(dup.node() == 3u);

    nodes = triangle_nodes();
    nodes[0].position.x = std::nan("");
    CHECK(error_code_of([&] { build_plan(nodes); }) == Errc::DegenerateLayout);
}

TEST_CASE("the seed fixture triangulates to the Euler count of its hull")
{
    const TrajectoryPlan plan = seed_fixture();
    REQUIRE(plan.size() == 25);
    const std::size_t h = oracle::hull_boundary_count(plan.positions());
    CHECK(h == 6);
    CHECK(plan.triangulation().triangle_count() == 2 * 25 - h - 2);
    CHECK(oracle::empty_circle_violations(plan.triangulation()) == 0);
}

TEST_CASE("insert followed by remove restores the original plan")
{
    const TrajectoryPlan plan = seed_fixture();
    const TrajectoryPlan inserted = edit_node(plan, InsertNode{{{3.0, 2.0}, {1.0, 0.2, -0.1}}});
    CHECK(inserted.size() == 26);
    CHECK(inserted.nodes().back().position == Point2{3.0, 2.0});
    const TrajectoryPlan restored = edit_node(inserted, RemoveNode{25});
    CHECK(restored == plan);
    CHECK(triangle_set(restored) == triangle_set(plan));
    CHECK(plan.size() == 25);
}

TEST_CASE("updating only parameters keeps the triangulation")
{
    const TrajectoryPlan plan = seed_fixture();
    PlanNode n = plan.nodes()[4];
    n.params.body_dir = -0.7;
    const TrajectoryPlan updated = edit_node(plan, UpdateNode{4, n});
    CHECK(updated.nodes()[4].params.body_dir == -0.7);
    CHECK(plan.nodes()[4].params.body_dir == 0.3);
    CHECK(updated.shared_triangulation() == plan.shared_triangulation());

    n.position = {-7.5, 0.5};
    const TrajectoryPlan moved = edit_node(plan, UpdateNode{4, n});
    CHECK(moved.nodes()[4].position == Point2{-7.5, 0.5});
    CHECK(oracle::empty_circle_violations(moved.triangulation()) == 0);

    n = plan.nodes()[4];
    n.params.acceleration = 3.5;
    CHECK(error_code_of([&] { edit_node(plan, UpdateNode{4, n}); }) == Errc::ParamOutOfRange);
}

TEST_CASE("removing an interior node drops two triangles")
{
    const TrajectoryPlan plan = seed_fixture();
    REQUIRE(plan.nodes()[9].position == Point2{-1.0, 0.0});
    const TrajectoryPlan removed = edit_node(plan, RemoveNode{9});
    CHECK(removed.triangulation().triangle_count() == plan.triangulation().triangle_count() - 2);
}

TEST_CASE("edits name unknown nodes and keep the input plan")
{
    const TrajectoryPlan plan = seed_fixture();
    const Error e = support::thrown_error([&] { edit_node(plan, RemoveNode{25}); });
    CHECK(e.code() == Errc::UnknownNode);
    CHECK(e.node() == 25u);
    CHECK(error_code_of([&] { edit_node(plan, UpdateNode{99, {}}); }) == Errc::UnknownNode);

    const TrajectoryPlan small = build_plan(triangle_nodes());
    CHECK(error_code_of([&] { edit_node(small, RemoveNode{0}); }) == Errc::TooFewNodes);
    CHECK(error_code_of([&] { edit_node(small, InsertNode{{{0, 0}, {}}}); }) == Errc::DegenerateLayout);
    CHECK(small.size() == 3);
}

TEST_CASE("query returns node parameters at nodes and the mean at equal distances")
{
    const TrajectoryPlan plan = seed_fixture();
    for (std::size_t i = 0; i < plan.size(); ++i) {
        const QueryResult q = plan.query(plan.nodes()[i].position);
        CHECK(q.params == plan.nodes()[i].params);
        CHECK_FALSE(q.used_fallback());
    }

    const double s = std::sqrt(3.0);
    const TrajectoryPlan eq = build_plan({{{0, 0}, {1.0, 0, 0}}, {{2, 0}, {2.0, 0, 0}}, {{1, s}, {3.0, 0, 0}}});
    CHECK(query(eq, {1.0, s / 3.0}).params.acceleration == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("query outside the hull falls back to the nearest node")
{
    const TrajectoryPlan plan = seed_fixture();
    const QueryResult q = plan.query({100.0, 100.0});
    REQUIRE(q.used_fallback());
    CHECK(plan.nodes()[*q.nearest_node].position == Point2{14.0, 7.0});
    CHECK(q.params == plan.nodes()[*q.nearest_node].params);
    CHECK_FALSE(q.triangle.has_value());
}

TEST_CASE("query on a shared edge uses the lower-index triangle and stays bounded")
{
    const TrajectoryPlan plan = seed_fixture();
    const Triangulation& tri = plan.triangulation();
    const auto verts = tri.vertices();
    const auto value = [&](std::size_t node, int k) {
        const NodeParams& p = plan.nodes()[node].params;
        return k == 0 ? p.acceleration : (k == 1 ? p.body_dir : p.ball_dir);
    };
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    for (std::size_t t = 0; t < tri.triangle_count(); ++t) {
        for (std::size_t e = 0; e < 3; ++e) {
            const std::size_t n = tri.adjacency()[t][e];
            if (n == kNoNeighbor) continue;
            const Triangle& a = tri.triangles()[t];
            const Point2 p0 = verts[a[e]], p1 = verts[a[(e + 1) % 3]];
            const double w = u(rng);
            const Point2 p{p0.x + w * (p1.x - p0.x), p0.y + w * (p1.y - p0.y)};
            const NodeParams q = plan.query(p).params;
            const Triangle& owner = tri.triangles()[std::min(t, n)];
            const Point2 vo[3]{verts[owner[0]], verts[owner[1]], verts[owner[2]]};
            for (int k = 0; k < 3; ++k) {
                const double io[3]{value(owner[0], k), value(owner[1], k), value(owner[2], k)};
                const double got = k == 0 ? q.acceleration : (k == 1 ? q.body_dir : q.ball_dir);
                CHECK(std::abs(got - oracle::weighted_mean(vo, io, p)) <= 1e-9);
            }
        }
    }

    std::uniform_real_distribution<double> ux(-14.0, 14.0), uy(-7.0, 7.0);
    for (int i = 0; i < 2000; ++i) {
        const Point2 p{ux(rng), uy(rng)};
        const QueryResult q = plan.query(p);
        if (!q.triangle) continue;
        const Triangle& t = tri.triangles()[*q.triangle];
        for (int k = 0; k < 3; ++k) {
            const double got = k == 0 ? q.params.acceleration : (k == 1 ? q.params.body_dir : q.params.ball_dir);
            CHECK(got >= std::min({value(t[0], k), value(t[1], k), value(t[2], k)}) - 1e-12);
            CHECK(got <= std::max({value(t[0], k), value(t[1], k), value(t[2], k)}) + 1e-12);
        }
    }
}

TEST_CASE("with_params validates length and limits")
{
    const TrajectoryPlan plan = build_plan(triangle_nodes());
    std::vector<NodeParams> params(2);
    CHECK(error_code_of([&] { plan.with_params(params); }) == Errc::LengthMismatch);
    params.assign(3, NodeParams{4.0, 0.0, 0.0});
    CHECK(error_code_of([&] { plan.with_params(params); }) == Errc::ParamOutOfRange);
}

TEST_CASE("limits validate their own ranges")
{
    ParamLimits limits;
    limits.body_dir_range = {1.0, -1.0};
    CHECK(error_code_of([&] { build_plan(triangle_nodes(), limits); }) == Errc::InvalidConfig);
    limits = {};
    limits.max_acceleration = -1.0;
    CHECK(error_code_of([&] { limits.validate(); }) == Errc::InvalidConfig);
}
