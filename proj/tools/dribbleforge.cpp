// Command-line front end: optimize, simulate, field-dump, validate, serve.

#include "dribbleforge/documents.hpp"
#include "dribbleforge/service.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <thread>

using namespace dribbleforge;

namespace {

std::atomic<bool> g_interrupted{false};

void on_signal(int) { g_interrupted = true; }

Point2 parse_pair(const std::string& text, const char* what)
{
    std::istringstream in(text);
    double x = 0.0, y = 0.0;
    char comma = 0;
    if (!(in >> x >> comma >> y) || comma != ',' || !(in >> std::ws).eof()) {
        throw CLI::ValidationError(what, "expected X,Y but got '" + text + "'");
    }
    return {x, y};
}

std::pair<std::size_t, std::size_t> parse_grid(const std::string& text)
{
    std::size_t nx = 0, ny = 0;
    char sep = 0;
    std::istringstream in(text);
    if (!(in >> nx >> sep >> ny) || (sep != 'x' && sep != 'X') || !(in >> std::ws).eof() || nx == 0 || ny == 0) {
        throw CLI::ValidationError("--grid", "expected NXxNY such as 40x30, got '" + text + "'");
    }
    return {nx, ny};
}

void emit(const std::string& out, const std::string& text)
{
    if (out.empty() || out == "-") {
        std::cout << text;
    } else {
        write_text_file(out, text);
    }
}

// "--start -12,0" reads as an option cluster to most parsers; glue such
// values to their option so negative coordinates work without '='.
std::vector<std::string> glue_negative_pairs(int argc, char** argv)
{
    std::vector<std::string> args(argv, argv + argc);
    std::vector<std::string> out;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const bool pair_option = args[i] == "--start" || args[i] == "--v0" || args[i] == "--obstacle";
        if (pair_option && i + 1 < args.size() && args[i + 1].size() > 1 && args[i + 1][0] == '-') {
            out.push_back(args[i] + "=" + args[i + 1]);
            ++i;
        } else {
            out.push_back(args[i]);
        }
    }
    return out;
}

int report_error(const Error& e)
{
    std::cerr << "error: " << e.what() << "\n" << error_to_json(e).dump() << "\n";
    return 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Design, optimize and replay obstacle-relative dribbling plans"};
    app.require_subcommand(1);

    std::string plan_path, ga_path, fitness_path, out_path, history_path, atlas_path;
    std::string start_text = "-12,0", v0_text = "4,0", grid_text = "40x30", obstacle_text;
    std::optional<std::uint64_t> seed_override;
    std::optional<std::size_t> generations_override;
    bool trace_json = false;

    auto* optimize = app.add_subcommand("optimize", "Evolve a seed plan and write the run report");
    optimize->add_option("--plan", plan_path, "Seed plan document")->required()->check(CLI::ExistingFile);
    optimize->add_option("--ga", ga_path, "GA config document")->check(CLI::ExistingFile);
    optimize->add_option("--fitness", fitness_path, "Fitness config document")->check(CLI::ExistingFile);
    optimize->add_option("--out", out_path, "Report path ('-' for stdout)")->required();
    optimize->add_option("--history", history_path, "Also write the fitness history as CSV");
    optimize->add_option("--seed", seed_override, "Override rng_seed");
    optimize->add_option("--generations", generations_override, "Override generation_count");

    auto* sim = app.add_subcommand("simulate", "Roll an agent through a plan and write its trace");
    sim->add_option("--plan", plan_path, "Plan document")->required()->check(CLI::ExistingFile);
    sim->add_option("--start", start_text, "Start position X,Y")->capture_default_str();
    sim->add_option("--v0", v0_text, "Initial velocity VX,VY")->capture_default_str();
    sim->add_option("--out", out_path, "Trace path ('-' for stdout)");
    sim->add_flag("--json", trace_json, "Write the JSON trace document with metrics instead of CSV");

    auto* field = app.add_subcommand("field-dump", "Sample the action field of a plan as CSV");
    auto* atlas_opt = field->add_option("--atlas", atlas_path, "Atlas document")->check(CLI::ExistingFile);
    auto* plan_opt = field->add_option("--plan", plan_path, "Plan document")->check(CLI::ExistingFile);
    atlas_opt->excludes(plan_opt);
    field->add_option("--grid", grid_text, "Grid size NXxNY")->capture_default_str();
    field->add_option("--obstacle", obstacle_text, "Obstacle X,Y for atlas blending (default: first anchor)");
    field->add_option("--out", out_path, "CSV path ('-' for stdout)");

    auto* validate = app.add_subcommand("validate", "Check a plan or atlas document");
    auto* vplan = validate->add_option("--plan", plan_path, "Plan document")->check(CLI::ExistingFile);
    auto* vatlas = validate->add_option("--atlas", atlas_path, "Atlas document")->check(CLI::ExistingFile);
    vplan->excludes(vatlas);

    int port = 8700;
    std::string host = "127.0.0.1", static_dir;
    auto* serve = app.add_subcommand("serve", "Run the HTTP service for the editor");
    serve->add_option("--port", port, "TCP port")->capture_default_str();
    serve->add_option("--host", host, "Bind address")->capture_default_str();
    serve->add_option("--static", static_dir, "Editor assets served at /")->check(CLI::ExistingDirectory);
    serve->add_option("--plan", plan_path, "Initial workspace plan")->check(CLI::ExistingFile);

    std::vector<std::string> args = glue_negative_pairs(argc, argv);
    std::reverse(args.begin(), args.end());
    args.pop_back();
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (optimize->parsed()) {
            const TrajectoryPlan plan = plan_from_json(read_json_file(plan_path));
            GaConfig ga = ga_path.empty() ? GaConfig{} : ga_from_json(read_json_file(ga_path));
            const FitnessConfig fit = fitness_path.empty() ? FitnessConfig{} : fitness_from_json(read_json_file(fitness_path));
            if (seed_override) ga.rng_seed = *seed_override;
            if (generations_override) ga.generation_count = *generations_override;
            const EvolutionResult result = evolve(plan, ga, fit);
            emit(out_path, report_to_json(result, ga, fit).dump(2) + "\n");
            if (!history_path.empty()) write_text_file(history_path, history_csv(result.history));
            std::cerr << "best fitness " << result.best_fitness << " after " << result.history.size() - 1
                      << " generations\n";
        } else if (sim->parsed()) {
            const TrajectoryPlan plan = plan_from_json(read_json_file(plan_path));
            const Point2 start = parse_pair(start_text, "--start");
            const Point2 v0 = parse_pair(v0_text, "--v0");
            const Trace trace = simulate(plan, start, {v0.x, v0.y});
            const TraceMetrics m = trace_metrics(trace);
            emit(out_path, trace_json ? trace_to_json(trace, &m).dump(2) + "\n" : trace_csv(trace));
            std::cerr << "min obstacle distance " << m.min_obstacle_distance << ", "
                      << to_string(trace.termination) << "\n";
        } else if (field->parsed()) {
            const auto [nx, ny] = parse_grid(grid_text);
            TrajectoryPlan plan;
            if (!atlas_path.empty()) {
                const FieldAtlas atlas = atlas_from_json(read_json_file(atlas_path));
                const Point2 obstacle = obstacle_text.empty() ? atlas.anchors().front().obstacle_position
                                                              : parse_pair(obstacle_text, "--obstacle");
                plan = resolve_plan(atlas, obstacle);
            } else if (!plan_path.empty()) {
                plan = plan_from_json(read_json_file(plan_path));
            } else {
                std::cerr << "field-dump needs --atlas or --plan\n";
                return 2;
            }
            emit(out_path, field_csv(sample_field(plan, nx, ny)));
        } else if (validate->parsed()) {
            if (!atlas_path.empty()) {
                const FieldAtlas atlas = atlas_from_json(read_json_file(atlas_path));
                std::cout << "ok: " << atlas.anchors().size() << " anchors, "
                          << (atlas.mode() == AtlasMode::Triangulated ? "triangulated" : "nearest-anchor") << "\n";
            } else if (!plan_path.empty()) {
                const TrajectoryPlan plan = plan_from_json(read_json_file(plan_path));
                std::cout << "ok: " << plan.size() << " nodes, " << plan.triangulation().triangle_count()
                          << " triangles\n";
            } else {
                std::cerr << "validate needs --plan or --atlas\n";
                return 2;
            }
        } else if (serve->parsed()) {
            ServiceOptions options;
            if (!plan_path.empty()) options.initial_plan = plan_from_json(read_json_file(plan_path));
            if (!static_dir.empty()) options.static_dir = static_dir;
            Service service(std::move(options));
            const int bound = service.bind(host, port);
            if (bound < 0) {
                std::cerr << "cannot bind " << host << ":" << port << "\n";
                return 1;
            }
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            std::jthread watcher([&service](std::stop_token stop) {
                while (!stop.stop_requested() && !g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(100));
                service.stop();
            });
            std::cerr << "listening on http://" << host << ":" << bound << "\n";
            service.run();
        }
    } catch (const Error& e) {
        return report_error(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
