#pragma once

#include "dribbleforge/geometry.hpp"

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace dribbleforge {

/// Motion parameters carried by a plan node. Angles are radians in the
/// obstacle-centric frame (+x toward the opponent goal).
struct NodeParams {
    double acceleration = 0.0; ///< m/s^2
    double body_dir = 0.0;
    double ball_dir = 0.0;

    friend bool operator==(const NodeParams&, const NodeParams&) = default;
};

inline constexpr std::array<std::string_view, 3> kParamNames{"acceleration", "body_dir", "ball_dir"};

/// Bounds shared by every node of a plan.
struct ParamLimits {
    double max_acceleration = 3.0;
    std::array<double, 2> body_dir_range{-std::numbers::pi / 2.0, std::numbers::pi / 2.0};
    std::array<double, 2> ball_dir_range{-std::numbers::pi / 2.0, std::numbers::pi / 2.0};

    NodeParams clamp(const NodeParams& p) const;

    /// Throws Error{ParamOutOfRange} naming `node` and the offending field.
    void check(const NodeParams& p, std::size_t node) const;

    /// Throws Error{InvalidConfig} when a range is empty or not finite.
    void validate() const;

    friend bool operator==(const ParamLimits&, const ParamLimits&) = default;
};

struct PlanNode {
    Point2 position; ///< obstacle at the origin
    NodeParams params;

    friend bool operator==(const PlanNode&, const PlanNode&) = default;
};

/// Minimum spacing between node positions of one plan.
inline constexpr double kMinNodeSpacing = 1e-6;

/// Outcome of a parameter query.
struct QueryResult {
    NodeParams params;
    std::optional<TriangleIndex> triangle;   ///< containing triangle when inside the hull
    std::optional<std::size_t> nearest_node; ///< set when the out-of-hull fallback was used

    bool used_fallback() const { return nearest_node.has_value(); }
};

/// Parameter lookup over a triangulated layout, shared by plans and by
/// blended lookups that never materialize a plan. `params_of(i)` yields the
/// parameters of node i. Inside the hull each parameter is the inverse-
/// distance mean over the containing triangle; outside it is the nearest
/// node's parameters. The result is clamped to `limits`.
QueryResult query_layout(const Triangulation& layout, Point2 p,
                         const std::function<NodeParams(std::size_t)>& params_of,
                         const ParamLimits& limits);

/// Triangulated set of obstacle-relative nodes. Immutable: edits and
/// parameter replacement return new plans. Plans that share a node layout
/// share one triangulation.
class TrajectoryPlan {
public:
    const std::vector<PlanNode>& nodes() const { return nodes_; }
    std::size_t size() const { return nodes_.size(); }
    const ParamLimits& limits() const { return limits_; }
    const Triangulation& triangulation() const { return *triangulation_; }
    std::shared_ptr<const Triangulation> shared_triangulation() const { return triangulation_; }
    std::vector<Point2> positions() const;

    QueryResult query(Point2 p) const;

    /// Same layout, new parameters (one entry per node, validated).
    TrajectoryPlan with_params(std::span<const NodeParams> params) const;

    /// Node positions, parameters, limits and triangle set all equal.
    friend bool operator==(const TrajectoryPlan& a, const TrajectoryPlan& b);

private:
    friend TrajectoryPlan build_plan(std::vector<PlanNode> nodes, ParamLimits limits);

    std::vector<PlanNode> nodes_;
    ParamLimits limits_;
    std::shared_ptr<const Triangulation> triangulation_;
};

/// Validates the nodes and triangulates their positions (node order kept).
/// Errors: TooFewNodes, DegenerateLayout, ParamOutOfRange.
TrajectoryPlan build_plan(std::vector<PlanNode> nodes, ParamLimits limits = {});

/// Free-function form of TrajectoryPlan::query.
inline QueryResult query(const TrajectoryPlan& plan, Point2 p) { return plan.query(p); }

struct InsertNode {
    PlanNode node; ///< appended after the existing nodes
};
struct UpdateNode {
    std::size_t index;
    PlanNode node;
};
struct RemoveNode {
    std::size_t index;
};
using EditAction = std::variant<InsertNode, UpdateNode, RemoveNode>;

/// Applies one edit and re-triangulates. The input plan is left untouched.
/// Errors: those of build_plan plus UnknownNode.
TrajectoryPlan edit_node(const TrajectoryPlan& plan, const EditAction& action);

} // namespace dribbleforge
