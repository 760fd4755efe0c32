#include "dribbleforge/plan.hpp"
#include "dribbleforge/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dribbleforge {

namespace {

void check_range(double value, double lo, double hi, std::size_t node, std::string_view field)
{
    if (!std::isfinite(value) || value < lo || value > hi) {
        throw Error(Errc::ParamOutOfRange,
                    "node " + std::to_string(node) + ": " + std::string(field) + " = "
                        + std::to_string(value) + " outside [" + std::to_string(lo) + ", "
                        + std::to_string(hi) + "]",
                    node, std::string(field));
    }
}

} // namespace

NodeParams ParamLimits::clamp(const NodeParams& p) const
{
    return {std::clamp(p.acceleration, 0.0, max_acceleration),
            std::clamp(p.body_dir, body_dir_range[0], body_dir_range[1]),
            std::clamp(p.ball_dir, ball_dir_range[0], ball_dir_range[1])};
}

void ParamLimits::check(const NodeParams& p, std::size_t node) const
{
    check_range(p.acceleration, 0.0, max_acceleration, node, kParamNames[0]);
    check_range(p.body_dir, body_dir_range[0], body_dir_range[1], node, kParamNames[1]);
    check_range(p.ball_dir, ball_dir_range[0], ball_dir_range[1], node, kParamNames[2]);
}

void ParamLimits::validate() const
{
    if (!std::isfinite(max_acceleration) || max_acceleration < 0.0) {
        throw Error(Errc::InvalidConfig, "max_acceleration must be finite and >= 0", std::nullopt,
                    "max_acceleration");
    }
    const auto range_ok = [](const std::array<double, 2>& r) {
        return std::isfinite(r[0]) && std::isfinite(r[1]) && r[0] <= r[1];
    };
    if (!range_ok(body_dir_range)) {
        throw Error(Errc::InvalidConfig, "body_dir_range must be a finite [lo, hi]", std::nullopt,
                    "body_dir_range");
    }
    if (!range_ok(ball_dir_range)) {
        throw Error(Errc::InvalidConfig, "ball_dir_range must be a finite [lo, hi]", std::nullopt,
                    "ball_dir_range");
    }
}

QueryResult query_layout(const Triangulation& layout, Point2 p,
                         const std::function<NodeParams(std::size_t)>& params_of,
                         const ParamLimits& limits)
{
    QueryResult out;
    const auto verts = layout.vertices();
    if (const auto t = layout.locate(p)) {
        const Triangle& tri = layout.triangles()[*t];
        const NodeParams a = params_of(tri[0]), b = params_of(tri[1]), c = params_of(tri[2]);
        const Point2 va = verts[tri[0]], vb = verts[tri[1]], vc = verts[tri[2]];
        out.params.acceleration = idw_interpolate(va, vb, vc, a.acceleration, b.acceleration, c.acceleration, p);
        out.params.body_dir = idw_interpolate(va, vb, vc, a.body_dir, b.body_dir, c.body_dir, p);
        out.params.ball_dir = idw_interpolate(va, vb, vc, a.ball_dir, b.ball_dir, c.ball_dir, p);
        out.triangle = t;
    } else {
        std::size_t nearest = 0;
        double best = distance(p, verts[0]);
        for (std::size_t i = 1; i < verts.size(); ++i) {
            const double d = distance(p, verts[i]);
            if (d < best) {
                best = d;
                nearest = i;
            }
        }
        out.params = params_of(nearest);
        out.nearest_node = nearest;
    }
    out.params = limits.clamp(out.params);
    return out;
}

std::vector<Point2> TrajectoryPlan::positions() const
{
    std::vector<Point2> out;
    out.reserve(nodes_.size());
    for (const PlanNode& n : nodes_) out.push_back(n.position);
    return out;
}

QueryResult TrajectoryPlan::query(Point2 p) const
{
    return query_layout(*triangulation_, p, [this](std::size_t i) { return nodes_[i].params; }, limits_);
}

TrajectoryPlan TrajectoryPlan::with_params(std::span<const NodeParams> params) const
{
    if (params.size() != nodes_.size()) {
        throw Error(Errc::LengthMismatch, "expected " + std::to_string(nodes_.size())
                                              + " parameter sets, got " + std::to_string(params.size()));
    }
    TrajectoryPlan out = *this;
    for (std::size_t i = 0; i < params.size(); ++i) {
        limits_.check(params[i], i);
        out.nodes_[i].params = params[i];
    }
    return out;
}

bool operator==(const TrajectoryPlan& a, const TrajectoryPlan& b)
{
    if (a.nodes_ != b.nodes_ || a.limits_ != b.limits_) return false;
    return a.triangulation_ == b.triangulation_ || *a.triangulation_ == *b.triangulation_;
}

TrajectoryPlan build_plan(std::vector<PlanNode> nodes, ParamLimits limits)
{
    limits.validate();
    if (nodes.size() < 3) {
        throw Error(Errc::TooFewNodes, "a plan needs at least 3 nodes, got " + std::to_string(nodes.size()));
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!is_finite(nodes[i].position)) {
            throw Error(Errc::DegenerateLayout, "node " + std::to_string(i) + " position is not finite", i,
                        "position");
        }
        limits.check(nodes[i].params, i);
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (std::size_t j = i + 1; j < nodes.size(); ++j) {
            if (distance(nodes[i].position, nodes[j].position) <= kMinNodeSpacing) {
                throw Error(Errc::DegenerateLayout,
                            "nodes " + std::to_string(i) + " and " + std::to_string(j) + " share a position", j,
                            "position");
            }
        }
    }

    std::vector<Point2> positions;
    positions.reserve(nodes.size());
    for (const PlanNode& n : nodes) positions.push_back(n.position);

    TrajectoryPlan plan;
    try {
        plan.triangulation_ = std::make_shared<const Triangulation>(triangulate(positions));
    } catch (const Error& e) {
        throw Error(Errc::DegenerateLayout, e.what());
    }
    plan.nodes_ = std::move(nodes);
    plan.limits_ = limits;
    return plan;
}

TrajectoryPlan edit_node(const TrajectoryPlan& plan, const EditAction& action)
{
    std::vector<PlanNode> nodes = plan.nodes();
    const auto require_index = [&](std::size_t index) {
        if (index >= nodes.size()) {
            throw Error(Errc::UnknownNode, "no node with index " + std::to_string(index), index);
        }
    };

    if (const auto* ins = std::get_if<InsertNode>(&action)) {
        nodes.push_back(ins->node);
    } else if (const auto* upd = std::get_if<UpdateNode>(&action)) {
        require_index(upd->index);
        if (nodes[upd->index].position == upd->node.position) {
            plan.limits().check(upd->node.params, upd->index);
            std::vector<NodeParams> params;
            params.reserve(nodes.size());
            for (const PlanNode& n : nodes) params.push_back(n.params);
            params[upd->index] = upd->node.params;
            return plan.with_params(params);
        }
        nodes[upd->index] = upd->node;
    } else {
        const auto& rem = std::get<RemoveNode>(action);
        require_index(rem.index);
        nodes.erase(nodes.begin() + static_cast<std::ptrdiff_t>(rem.index));
    }
    return build_plan(std::move(nodes), plan.limits());
}

} // namespace dribbleforge
