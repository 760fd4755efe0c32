#include "dribbleforge/atlas.hpp"
#include "dribbleforge/error.hpp"

#include <cmath>
#include <string>

namespace dribbleforge {

namespace {

constexpr double kLayoutTolerance = 1e-9;

double frame_rotation(Point2 obstacle, Point2 goal)
{
    if (distance(obstacle, goal) <= kCoincidenceTolerance) {
        throw Error(Errc::CoincidentGoalObstacle, "goal and obstacle coincide");
    }
    return std::atan2(goal.y - obstacle.y, goal.x - obstacle.x);
}

std::size_t nearest_anchor(const FieldAtlas& atlas, Point2 p)
{
    std::size_t best = 0;
    double best_d = distance(p, atlas.anchors()[0].obstacle_position);
    for (std::size_t i = 1; i < atlas.anchors().size(); ++i) {
        const double d = distance(p, atlas.anchors()[i].obstacle_position);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

NodeParams blend_node(const FieldAtlas& atlas, const AnchorBlend& blend, Point2 obstacle, std::size_t node)
{
    const auto& anchors = atlas.anchors();
    if (blend.count == 1) return anchors[blend.anchor[0]].plan.nodes()[node].params;
    const NodeParams& a = anchors[blend.anchor[0]].plan.nodes()[node].params;
    const NodeParams& b = anchors[blend.anchor[1]].plan.nodes()[node].params;
    const NodeParams& c = anchors[blend.anchor[2]].plan.nodes()[node].params;
    const auto& [pa, pb, pc] = blend.position;
    return {idw_interpolate(pa, pb, pc, a.acceleration, b.acceleration, c.acceleration, obstacle),
            idw_interpolate(pa, pb, pc, a.body_dir, b.body_dir, c.body_dir, obstacle),
            idw_interpolate(pa, pb, pc, a.ball_dir, b.ball_dir, c.ball_dir, obstacle)};
}

} // namespace

FieldAtlas build_atlas(std::vector<AnchorPlan> anchors, Point2 goal)
{
    if (anchors.empty()) throw Error(Errc::EmptyAnchors, "an atlas needs at least one anchor");
    const TrajectoryPlan& ref = anchors.front().plan;
    for (std::size_t a = 1; a < anchors.size(); ++a) {
        const TrajectoryPlan& p = anchors[a].plan;
        const std::string who = "anchor " + std::to_string(a);
        if (p.size() != ref.size()) {
            throw Error(Errc::LayoutMismatch, who + " has " + std::to_string(p.size()) + " nodes, anchor 0 has "
                                                  + std::to_string(ref.size()));
        }
        if (!(p.limits() == ref.limits())) {
            throw Error(Errc::LayoutMismatch, who + " has different parameter limits", std::nullopt, "limits");
        }
        for (std::size_t n = 0; n < p.size(); ++n) {
            if (distance(p.nodes()[n].position, ref.nodes()[n].position) > kLayoutTolerance) {
                throw Error(Errc::LayoutMismatch, who + " node " + std::to_string(n) + " is not at anchor 0's position",
                            n, "position");
            }
        }
    }

    FieldAtlas atlas;
    atlas.goal_ = goal;
    std::vector<Point2> positions;
    positions.reserve(anchors.size());
    for (const AnchorPlan& a : anchors) positions.push_back(a.obstacle_position);
    atlas.anchors_ = std::move(anchors);
    if (positions.size() >= 3) {
        try {
            atlas.field_ = triangulate(positions);
            atlas.mode_ = AtlasMode::Triangulated;
        } catch (const Error&) {
            atlas.mode_ = AtlasMode::NearestAnchor;
        }
    }
    return atlas;
}

AnchorBlend anchor_blend(const FieldAtlas& atlas, Point2 obstacle)
{
    AnchorBlend blend;
    if (atlas.mode() == AtlasMode::Triangulated) {
        if (const auto t = atlas.field_triangulation().locate(obstacle)) {
            const Triangle& tri = atlas.field_triangulation().triangles()[*t];
            blend.count = 3;
            for (std::size_t k = 0; k < 3; ++k) {
                blend.anchor[k] = tri[k];
                blend.position[k] = atlas.anchors()[tri[k]].obstacle_position;
            }
            return blend;
        }
    }
    blend.anchor[0] = nearest_anchor(atlas, obstacle);
    blend.position[0] = atlas.anchors()[blend.anchor[0]].obstacle_position;
    return blend;
}

TrajectoryPlan resolve_plan(const FieldAtlas& atlas, Point2 obstacle)
{
    const AnchorBlend blend = anchor_blend(atlas, obstacle);
    const TrajectoryPlan& ref = atlas.anchors()[blend.anchor[0]].plan;
    if (blend.count == 1) return ref;
    std::vector<NodeParams> params(ref.size());
    for (std::size_t n = 0; n < params.size(); ++n) {
        params[n] = ref.limits().clamp(blend_node(atlas, blend, obstacle, n));
    }
    return ref.with_params(params);
}

Point2 to_obstacle_frame(Point2 world, Point2 obstacle, Point2 goal)
{
    const double theta = frame_rotation(obstacle, goal);
    const double c = std::cos(theta), s = std::sin(theta);
    const double dx = world.x - obstacle.x, dy = world.y - obstacle.y;
    return {c * dx + s * dy, -s * dx + c * dy};
}

Point2 from_obstacle_frame(Point2 local, Point2 obstacle, Point2 goal)
{
    const double theta = frame_rotation(obstacle, goal);
    const double c = std::cos(theta), s = std::sin(theta);
    return {obstacle.x + c * local.x - s * local.y, obstacle.y + s * local.x + c * local.y};
}

DribbleAction dribble_action(const FieldAtlas& atlas, Point2 agent_world, Point2 obstacle_world)
{
    DribbleAction out;
    out.frame_rotation = frame_rotation(obstacle_world, atlas.goal());
    out.local_position = to_obstacle_frame(agent_world, obstacle_world, atlas.goal());

    const AnchorBlend blend = anchor_blend(atlas, obstacle_world);
    const TrajectoryPlan& ref = atlas.anchors()[blend.anchor[0]].plan;
    const QueryResult q = query_layout(
        ref.triangulation(), out.local_position,
        [&](std::size_t node) { return ref.limits().clamp(blend_node(atlas, blend, obstacle_world, node)); }, ref.limits());
    out.params = q.params;
    out.fallback = q.used_fallback();
    out.world_body_dir = wrap_angle(out.params.body_dir + out.frame_rotation);
    out.world_ball_dir = wrap_angle(out.params.ball_dir + out.frame_rotation);
    return out;
}

} // namespace dribbleforge
