#pragma once

#include "dribbleforge/plan.hpp"
#include "dribbleforge/simulation.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace dribbleforge {

struct ServiceOptions {
    std::optional<TrajectoryPlan> initial_plan;
    std::optional<std::filesystem::path> static_dir; ///< served at "/"
    SimConfig sim;                                    ///< defaults for /api/simulate and /api/field
};

/// HTTP facade over one workspace plan and at most one optimize job.
///
///   GET/PUT /api/plan, GET /api/plan/triangulation
///   POST /api/optimize, GET /api/optimize/{id}, GET /api/optimize/{id}/events,
///   DELETE /api/optimize/{id}
///   POST /api/simulate, GET /api/field?nx=&ny=
///
/// Jobs run on their own thread and copy the workspace plan when they start.
class Service {
public:
    explicit Service(ServiceOptions options = {});
    ~Service();

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Binds to host:port (port 0 picks a free one) and returns the port, or -1.
    int bind(const std::string& host, int port);

    /// Serves until stop(); call after bind().
    bool run();

    /// Stops listening and cancels the running job. Safe from any thread.
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace dribbleforge
