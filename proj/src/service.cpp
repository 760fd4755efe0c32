#include "dribbleforge/service.hpp"
#include "dribbleforge/documents.hpp"
#include "dribbleforge/evolution.hpp"

#include <httplib.h>

#include <atomic>
#include <charconv>
#include <chrono>
#include <condition_variable>
#include <map>
#include <mutex>
#include <thread>

namespace dribbleforge {

namespace {

using namespace std::chrono_literals;

constexpr std::size_t kMaxFieldSide = 1000;
constexpr auto kEventPoll = 200ms;

enum class JobStatus { Pending, Running, Done, Cancelled, Failed };

std::string_view to_string(JobStatus s)
{
    switch (s) {
    case JobStatus::Pending: return "pending";
    case JobStatus::Running: return "running";
    case JobStatus::Done: return "done";
    case JobStatus::Cancelled: return "cancelled";
    case JobStatus::Failed: return "failed";
    }
    return "unknown";
}

bool is_terminal(JobStatus s) { return s == JobStatus::Done || s == JobStatus::Cancelled || s == JobStatus::Failed; }

// Status and history change only under `mutex`; `history` only grows.
struct Job {
    std::string id;
    GaConfig ga;
    FitnessConfig fit;
    TrajectoryPlan plan;

    std::mutex mutex;
    std::condition_variable changed;
    JobStatus status = JobStatus::Pending;
    std::vector<GenerationStats> history;
    std::optional<Json> report;
    std::string error;

    std::mutex join_mutex;
    std::jthread worker;

    Json document()
    {
        std::scoped_lock lock(mutex);
        Json doc{{"id", id},
                 {"status", to_string(status)},
                 {"ga", ga_to_json(ga)},
                 {"fitness", fitness_to_json(fit)},
                 {"generation", history.empty() ? Json(nullptr) : Json(history.back().generation)},
                 {"history", history_to_json(history)}};
        if (report) doc["report"] = *report;
        if (!error.empty()) doc["error"] = error;
        return doc;
    }

    void cancel_and_join()
    {
        std::scoped_lock lock(join_mutex);
        if (worker.joinable()) {
            worker.request_stop();
            worker.join();
        }
    }
};

void reply(httplib::Response& res, int status, const Json& body)
{
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

Json failure(std::string_view error, std::string_view message) { return {{"error", error}, {"message", message}}; }

Json validation_failure(const Error& e)
{
    Json body = error_to_json(e);
    body["code"] = body["error"];
    body["error"] = "ValidationFailed";
    return body;
}

Json parse_body(const httplib::Request& req)
{
    if (req.body.empty()) return Json::object();
    Json doc = parse_json(req.body);
    if (!doc.is_object()) throw Error(Errc::InvalidDocument, "request body must be a JSON object");
    return doc;
}

Point2 point_or(const Json& body, const char* key, Point2 fallback)
{
    if (!body.contains(key)) return fallback;
    const Json& v = body[key];
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
        return {v[0].get<double>(), v[1].get<double>()};
    }
    if (v.is_object() && v.contains("x") && v.contains("y") && v["x"].is_number() && v["y"].is_number()) {
        return {v["x"].get<double>(), v["y"].get<double>()};
    }
    throw Error(Errc::InvalidDocument, std::string(key) + " must be [x, y] or {\"x\", \"y\"}", std::nullopt, key);
}

std::size_t size_param(const httplib::Request& req, const char* key, std::size_t fallback)
{
    if (!req.has_param(key)) return fallback;
    const std::string v = req.get_param_value(key);
    std::size_t out = 0;
    const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || end != v.data() + v.size() || out == 0 || out > kMaxFieldSide) {
        throw Error(Errc::InvalidConfig, std::string(key) + " must be an integer in [1, 1000]", std::nullopt, key);
    }
    return out;
}

std::string sse(std::string_view event, const Json& data)
{
    return "event: " + std::string(event) + "\ndata: " + data.dump() + "\n\n";
}

} // namespace

struct Service::Impl {
    ServiceOptions options;
    httplib::Server server;
    std::atomic<bool> stopping{false};

    std::mutex plan_mutex;
    std::optional<TrajectoryPlan> plan;

    std::mutex jobs_mutex;
    std::map<std::string, std::shared_ptr<Job>> jobs;
    std::size_t next_job = 1;

    explicit Impl(ServiceOptions opts) : options(std::move(opts)), plan(options.initial_plan) { routes(); }

    ~Impl()
    {
        stopping = true;
        server.stop();
        cancel_all();
    }

    void cancel_all()
    {
        std::vector<std::shared_ptr<Job>> all;
        {
            std::scoped_lock lock(jobs_mutex);
            for (auto& [id, job] : jobs) all.push_back(job);
        }
        for (auto& job : all) {
            job->cancel_and_join();
            job->changed.notify_all();
        }
    }

    std::optional<TrajectoryPlan> current_plan()
    {
        std::scoped_lock lock(plan_mutex);
        return plan;
    }

    std::shared_ptr<Job> find_job(const std::string& id)
    {
        std::scoped_lock lock(jobs_mutex);
        const auto it = jobs.find(id);
        return it == jobs.end() ? nullptr : it->second;
    }

    template <class Fn>
    httplib::Server::Handler guarded(Fn fn)
    {
        return [fn](const httplib::Request& req, httplib::Response& res) {
            try {
                fn(req, res);
            } catch (const Error& e) {
                reply(res, 400, error_to_json(e));
            } catch (const std::exception& e) {
                reply(res, 500, failure("Internal", e.what()));
            }
        };
    }

    void routes()
    {
        server.Get("/api/plan", guarded([this](const httplib::Request&, httplib::Response& res) {
            const auto p = current_plan();
            if (!p) return reply(res, 404, failure("NoPlan", "no workspace plan loaded"));
            reply(res, 200, plan_to_json(*p));
        }));

        server.Put("/api/plan", guarded([this](const httplib::Request& req, httplib::Response& res) {
            try {
                TrajectoryPlan p = plan_from_json(parse_json(req.body));
                Json doc = plan_to_json(p);
                {
                    std::scoped_lock lock(plan_mutex);
                    plan = std::move(p);
                }
                reply(res, 200, doc);
            } catch (const Error& e) {
                reply(res, 422, error_to_json(e));
            }
        }));

        server.Get("/api/plan/triangulation", guarded([this](const httplib::Request&, httplib::Response& res) {
            const auto p = current_plan();
            if (!p) return reply(res, 404, failure("NoPlan", "no workspace plan loaded"));
            Json triangles = Json::array();
            for (const Triangle& t : p->triangulation().triangles()) triangles.push_back(t);
            reply(res, 200, {{"vertex_count", p->size()}, {"triangles", std::move(triangles)}});
        }));

        server.Post("/api/optimize", guarded([this](const httplib::Request& req, httplib::Response& res) {
            GaConfig ga;
            FitnessConfig fit;
            try {
                const Json body = parse_body(req);
                if (body.contains("ga")) ga = ga_from_json(body["ga"]);
                if (body.contains("fitness")) fit = fitness_from_json(body["fitness"]);
            } catch (const Error& e) {
                return reply(res, 400, validation_failure(e));
            }
            const auto p = current_plan();
            if (!p) return reply(res, 409, failure("NoPlan", "load a workspace plan before optimizing"));

            std::shared_ptr<Job> job;
            {
                std::scoped_lock lock(jobs_mutex);
                for (auto& [id, other] : jobs) {
                    std::scoped_lock job_lock(other->mutex);
                    if (!is_terminal(other->status)) {
                        return reply(res, 409, failure("Busy", "job " + id + " is still running"));
                    }
                }
                job = std::make_shared<Job>();
                job->id = "job-" + std::to_string(next_job++);
                job->ga = ga;
                job->fit = fit;
                job->plan = *p;
                jobs.emplace(job->id, job);
                std::scoped_lock join_lock(job->join_mutex);
                job->worker = std::jthread([job](std::stop_token stop) { run_job(*job, std::move(stop)); });
            }
            reply(res, 202, {{"job_id", job->id}});
        }));

        server.Get(R"(/api/optimize/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const auto job = find_job(req.matches[1]);
            if (!job) return reply(res, 404, failure("NotFound", "unknown job"));
            reply(res, 200, job->document());
        }));

        server.Delete(R"(/api/optimize/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const auto job = find_job(req.matches[1]);
            if (!job) return reply(res, 404, failure("NotFound", "unknown job"));
            job->cancel_and_join();
            reply(res, 200, job->document());
        }));

        server.Get(R"(/api/optimize/([^/]+)/events)", [this](const httplib::Request& req, httplib::Response& res) {
            const auto job = find_job(req.matches[1]);
            if (!job) return reply(res, 404, failure("NotFound", "unknown job"));
            res.set_header("Cache-Control", "no-cache");
            auto sent = std::make_shared<std::size_t>(0);
            res.set_chunked_content_provider("text/event-stream", [this, job, sent](std::size_t, httplib::DataSink& sink) {
                std::string out;
                bool finished = false;
                Json summary;
                {
                    std::unique_lock lock(job->mutex);
                    job->changed.wait_for(lock, kEventPoll, [&] {
                        return job->history.size() > *sent || is_terminal(job->status) || stopping.load();
                    });
                    for (; *sent < job->history.size(); ++*sent) {
                        const GenerationStats& g = job->history[*sent];
                        out += sse("generation",
                                   {{"generation", g.generation}, {"best", g.best}, {"mean", g.mean}, {"worst", g.worst}});
                    }
                    finished = is_terminal(job->status);
                    if (finished) {
                        summary = {{"id", job->id}, {"status", to_string(job->status)}, {"generations", job->history.size()}};
                        if (!job->error.empty()) summary["error"] = job->error;
                    }
                }
                if (finished) out += sse("done", summary);
                if (!out.empty() && !sink.write(out.data(), out.size())) return false;
                if (finished || stopping) sink.done();
                return true;
            });
        });

        server.Post("/api/simulate", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const auto p = current_plan();
            if (!p) return reply(res, 404, failure("NoPlan", "no workspace plan loaded"));
            const Json body = parse_body(req);
            const Point2 start = point_or(body, "start", {-12.0, 0.0});
            const Point2 v0 = point_or(body, "v0", {4.0, 0.0});
            const SimConfig cfg = body.contains("sim_config") ? sim_from_json(body["sim_config"]) : options.sim;
            const Trace trace = simulate(*p, start, {v0.x, v0.y}, cfg);
            const TraceMetrics metrics = trace_metrics(trace);
            Json doc = trace_to_json(trace, &metrics);
            doc["kickable_radius"] = cfg.kickable_radius;
            reply(res, 200, doc);
        }));

        server.Get("/api/field", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const auto p = current_plan();
            if (!p) return reply(res, 404, failure("NoPlan", "no workspace plan loaded"));
            const std::size_t nx = size_param(req, "nx", 40);
            const std::size_t ny = size_param(req, "ny", 30);
            reply(res, 200, field_to_json(sample_field(*p, nx, ny, {4.0, 0.0}, options.sim)));
        }));

        if (options.static_dir) server.set_mount_point("/", options.static_dir->string());
    }

    static void run_job(Job& job, std::stop_token stop)
    {
        {
            std::scoped_lock lock(job.mutex);
            job.status = JobStatus::Running;
        }
        job.changed.notify_all();
        EvolveHooks hooks;
        hooks.stop = std::move(stop);
        hooks.on_generation = [&job](const GenerationStats& g) {
            {
                std::scoped_lock lock(job.mutex);
                job.history.push_back(g);
            }
            job.changed.notify_all();
        };
        try {
            const EvolutionResult result = evolve(job.plan, job.ga, job.fit, hooks);
            Json report = report_to_json(result, job.ga, job.fit);
            std::scoped_lock lock(job.mutex);
            job.report = std::move(report);
            job.status = result.cancelled ? JobStatus::Cancelled : JobStatus::Done;
        } catch (const std::exception& e) {
            std::scoped_lock lock(job.mutex);
            job.error = e.what();
            job.status = JobStatus::Failed;
        }
        job.changed.notify_all();
    }
};

Service::Service(ServiceOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

Service::~Service() = default;

int Service::bind(const std::string& host, int port)
{
    if (port == 0) return impl_->server.bind_to_any_port(host);
    return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool Service::run() { return impl_->server.listen_after_bind(); }

void Service::stop()
{
    impl_->stopping = true;
    impl_->server.stop();
    impl_->cancel_all();
}

} // namespace dribbleforge
