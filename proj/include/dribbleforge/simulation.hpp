#pragma once

#include "dribbleforge/plan.hpp"

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace dribbleforge {

struct AgentState {
    Point2 position;
    Vec2 velocity;
    double time = 0.0;

    friend bool operator==(const AgentState&, const AgentState&) = default;
};

struct SimConfig {
    double dt = 0.1;
    std::size_t max_steps = 300;
    double max_speed = 10.0;
    double kickable_radius = 1.085;
    double finish_x = 12.0;

    /// Throws Error{InvalidConfig} naming the offending field.
    void validate() const;

    friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

enum class Termination { Finished, StepLimit };

std::string_view to_string(Termination t);

/// commands[k] is the plan query at states[k]; the last one is the command
/// that would apply next, so both lists have equal length.
struct Trace {
    std::vector<AgentState> states;
    std::vector<NodeParams> commands;
    Termination termination = Termination::StepLimit;
    bool fallback_used = false;
};

struct TraceMetrics {
    double min_obstacle_distance = 0.0; ///< over the piecewise-linear path
    double path_length = 0.0;
    std::optional<double> finish_time;
    std::optional<double> mean_speed_before; ///< states with x < obstacle.x
    std::optional<double> mean_speed_after;  ///< states with x > obstacle.x
    bool fallback_used = false;
};

/// One kinematic step. The heading turns toward params.body_dir by at most
/// a / max(|v|, 0.1) * dt; the share of that turn budget left unused raises
/// the speed by up to a * dt, capped at max_speed. Position advances by the
/// pre-step velocity.
AgentState step(const AgentState& state, const NodeParams& params, const SimConfig& cfg);

/// Rolls the agent forward on the plan until x >= finish_x or max_steps.
Trace simulate(const TrajectoryPlan& plan, Point2 start, Vec2 v0, const SimConfig& cfg = {});

/// Throws Error{EmptyTrace} for a trace without states.
TraceMetrics trace_metrics(const Trace& trace, Point2 obstacle = {});

struct FieldSample {
    double x = 0.0;
    double y = 0.0;
    double accel = 0.0;
    double body_dir = 0.0;
    double speed = 0.0; ///< agent speed on first reaching x when started at the row's left edge
};

struct FieldGrid {
    std::size_t nx = 0;
    std::size_t ny = 0;
    std::vector<FieldSample> samples; ///< row-major, y outer, x inner
};

/// Samples the plan on an nx by ny grid spanning the node bounding box. Each
/// row is also simulated from its left edge with velocity v0 to fill `speed`.
/// Throws Error{InvalidConfig} when nx or ny is zero.
FieldGrid sample_field(const TrajectoryPlan& plan, std::size_t nx, std::size_t ny, Vec2 v0 = {4.0, 0.0},
                       const SimConfig& cfg = {});

} // namespace dribbleforge
