#include "dribbleforge/simulation.hpp"
#include "dribbleforge/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace dribbleforge {

namespace {

constexpr double kMinTurnSpeed = 0.1;
constexpr double kTurnBudgetEpsilon = 1e-12;

void require_config(bool ok, std::string_view field, std::string_view msg)
{
    if (!ok) {
        throw Error(Errc::InvalidConfig, std::string(field) + " " + std::string(msg), std::nullopt,
                    std::string(field));
    }
}

double point_segment_distance(Point2 p, Point2 a, Point2 b)
{
    const Vec2 ab = b - a;
    const Vec2 ap = p - a;
    const double len2 = ab.x * ab.x + ab.y * ab.y;
    if (len2 == 0.0) return distance(p, a);
    const double t = std::clamp((ap.x * ab.x + ap.y * ab.y) / len2, 0.0, 1.0);
    return distance(p, a + t * ab);
}

std::optional<double> mean_or_none(double sum, std::size_t count)
{
    if (count == 0) return std::nullopt;
    return sum / static_cast<double>(count);
}

} // namespace

std::string_view to_string(Termination t)
{
    return t == Termination::Finished ? "finished" : "step_limit";
}

void SimConfig::validate() const
{
    require_config(std::isfinite(dt) && dt > 0.0, "dt", "must be finite and > 0");
    require_config(max_steps >= 1, "max_steps", "must be at least 1");
    require_config(std::isfinite(max_speed) && max_speed > 0.0, "max_speed", "must be finite and > 0");
    require_config(std::isfinite(kickable_radius) && kickable_radius >= 0.0, "kickable_radius",
                   "must be finite and >= 0");
    require_config(std::isfinite(finish_x), "finish_x", "must be finite");
}

AgentState step(const AgentState& state, const NodeParams& params, const SimConfig& cfg)
{
    const double speed = state.velocity.norm();
    const double heading = std::atan2(state.velocity.y, state.velocity.x);
    const double max_turn = params.acceleration / std::max(speed, kMinTurnSpeed) * cfg.dt;
    const double turn = std::clamp(wrap_angle(params.body_dir - heading), -max_turn, max_turn);
    const double throttle = 1.0 - std::abs(turn) / (max_turn + kTurnBudgetEpsilon);
    const double new_speed = std::min(cfg.max_speed, speed + params.acceleration * cfg.dt * throttle);
    const double new_heading = heading + turn;

    AgentState next;
    next.position = state.position + cfg.dt * state.velocity;
    next.velocity = {new_speed * std::cos(new_heading), new_speed * std::sin(new_heading)};
    next.time = state.time + cfg.dt;
    return next;
}

Trace simulate(const TrajectoryPlan& plan, Point2 start, Vec2 v0, const SimConfig& cfg)
{
    cfg.validate();
    Trace trace;
    trace.states.push_back({start, v0, 0.0});
    const auto command_at = [&](Point2 p) {
        const QueryResult q = plan.query(p);
        trace.fallback_used = trace.fallback_used || q.used_fallback();
        trace.commands.push_back(q.params);
        return q.params;
    };

    if (start.x >= cfg.finish_x) {
        trace.termination = Termination::Finished;
    } else {
        for (std::size_t k = 0; k < cfg.max_steps; ++k) {
            AgentState next = step(trace.states.back(), command_at(trace.states.back().position), cfg);
            next.time = static_cast<double>(k + 1) * cfg.dt;
            trace.states.push_back(next);
            if (next.position.x >= cfg.finish_x) {
                trace.termination = Termination::Finished;
                break;
            }
        }
    }
    command_at(trace.states.back().position);
    return trace;
}

TraceMetrics trace_metrics(const Trace& trace, Point2 obstacle)
{
    if (trace.states.empty()) throw Error(Errc::EmptyTrace, "trace has no states");
    TraceMetrics m;
    m.fallback_used = trace.fallback_used;
    m.min_obstacle_distance = distance(obstacle, trace.states.front().position);

    double before_sum = 0.0, after_sum = 0.0;
    std::size_t before_n = 0, after_n = 0;
    for (std::size_t i = 0; i < trace.states.size(); ++i) {
        const AgentState& s = trace.states[i];
        if (i > 0) {
            const Point2 prev = trace.states[i - 1].position;
            m.path_length += distance(prev, s.position);
            m.min_obstacle_distance = std::min(m.min_obstacle_distance, point_segment_distance(obstacle, prev, s.position));
        }
        const double speed = s.velocity.norm();
        if (s.position.x < obstacle.x) {
            before_sum += speed;
            ++before_n;
        } else if (s.position.x > obstacle.x) {
            after_sum += speed;
            ++after_n;
        }
    }
    m.mean_speed_before = mean_or_none(before_sum, before_n);
    m.mean_speed_after = mean_or_none(after_sum, after_n);
    if (trace.termination == Termination::Finished) m.finish_time = trace.states.back().time;
    return m;
}

FieldGrid sample_field(const TrajectoryPlan& plan, std::size_t nx, std::size_t ny, Vec2 v0, const SimConfig& cfg)
{
    require_config(nx >= 1, "nx", "must be at least 1");
    require_config(ny >= 1, "ny", "must be at least 1");

    double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
    double y_lo = x_lo, y_hi = -x_lo;
    for (const PlanNode& n : plan.nodes()) {
        x_lo = std::min(x_lo, n.position.x);
        x_hi = std::max(x_hi, n.position.x);
        y_lo = std::min(y_lo, n.position.y);
        y_hi = std::max(y_hi, n.position.y);
    }
    const auto coord = [](double lo, double hi, std::size_t i, std::size_t n) {
        return n == 1 ? (lo + hi) / 2.0 : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    };

    SimConfig row_cfg = cfg;
    row_cfg.finish_x = x_hi;

    FieldGrid grid{nx, ny, {}};
    grid.samples.reserve(nx * ny);
    for (std::size_t j = 0; j < ny; ++j) {
        const double y = coord(y_lo, y_hi, j, ny);
        const Trace row = simulate(plan, {x_lo, y}, v0, row_cfg);
        std::size_t cursor = 0;
        for (std::size_t i = 0; i < nx; ++i) {
            const double x = coord(x_lo, x_hi, i, nx);
            while (cursor + 1 < row.states.size() && row.states[cursor].position.x < x) ++cursor;
            const NodeParams p = plan.query({x, y}).params;
            grid.samples.push_back({x, y, p.acceleration, p.body_dir, row.states[cursor].velocity.norm()});
        }
    }
    return grid;
}

} // namespace dribbleforge
