#pragma once

#include "dribbleforge/plan.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace dribbleforge {

/// A plan optimized for one obstacle position on the field.
struct AnchorPlan {
    Point2 obstacle_position; ///< field frame
    TrajectoryPlan plan;
};

enum class AtlasMode {
    Triangulated,  ///< blends the three anchors around the obstacle
    NearestAnchor, ///< fewer than three anchors, or all collinear
};

/// Anchored plans over the field plus the triangulation of their obstacle
/// positions. All anchors share one node layout and one set of limits.
class FieldAtlas {
public:
    const std::vector<AnchorPlan>& anchors() const { return anchors_; }
    Point2 goal() const { return goal_; }
    AtlasMode mode() const { return mode_; }
    /// Empty in NearestAnchor mode.
    const Triangulation& field_triangulation() const { return field_; }

private:
    friend FieldAtlas build_atlas(std::vector<AnchorPlan> anchors, Point2 goal);

    std::vector<AnchorPlan> anchors_;
    Point2 goal_;
    AtlasMode mode_ = AtlasMode::NearestAnchor;
    Triangulation field_;
};

/// Errors: EmptyAnchors, LayoutMismatch (node count, position within 1e-9 m,
/// or limits differ from anchor 0; names the anchor and node).
FieldAtlas build_atlas(std::vector<AnchorPlan> anchors, Point2 goal);

/// Anchor weights for an obstacle position: one anchor (weight 1) at a
/// vertex, outside the field hull or in NearestAnchor mode, else the three
/// anchors of the containing field triangle.
struct AnchorBlend {
    std::array<std::size_t, 3> anchor{};
    std::array<Point2, 3> position{};
    std::size_t count = 1;
};

AnchorBlend anchor_blend(const FieldAtlas& atlas, Point2 obstacle);

/// Per-node, per-parameter inverse-distance blend of the surrounding anchor
/// plans. The result reuses the shared node triangulation.
TrajectoryPlan resolve_plan(const FieldAtlas& atlas, Point2 obstacle);

/// Obstacle-centric frame: origin at the obstacle, +x toward the goal.
/// Throws Error{CoincidentGoalObstacle} when the two coincide.
Point2 to_obstacle_frame(Point2 world, Point2 obstacle, Point2 goal);
Point2 from_obstacle_frame(Point2 local, Point2 obstacle, Point2 goal);

struct DribbleAction {
    NodeParams params;        ///< obstacle frame
    Point2 local_position;    ///< agent in the obstacle frame
    double frame_rotation = 0.0; ///< field bearing of the frame's +x axis
    double world_body_dir = 0.0;
    double world_ball_dir = 0.0;
    bool fallback = false;    ///< agent outside the plan's node hull
};

/// Parameters for an agent dribbling past an obstacle. Blends only the
/// nodes the query touches, so no plan is materialized.
DribbleAction dribble_action(const FieldAtlas& atlas, Point2 agent_world, Point2 obstacle_world);

} // namespace dribbleforge
