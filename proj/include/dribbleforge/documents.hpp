#pragma once

#include "dribbleforge/atlas.hpp"
#include "dribbleforge/error.hpp"
#include "dribbleforge/evolution.hpp"
#include "dribbleforge/simulation.hpp"

#include <json.hpp>

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

// JSON and CSV forms of the library's values. Doubles are written in the
// shortest form that parses back to the same bits. Parsers throw
// Error{InvalidDocument} for structural problems (naming the node and field
// when one applies) and the building function's own errors otherwise.

namespace dribbleforge {

using Json = nlohmann::json;

inline constexpr std::string_view kPlanFormat = "dribbleforge-plan/1";
inline constexpr std::string_view kReportFormat = "dribbleforge-report/1";

Json limits_to_json(const ParamLimits& limits);
ParamLimits limits_from_json(const Json& doc);

Json plan_to_json(const TrajectoryPlan& plan);
TrajectoryPlan plan_from_json(const Json& doc);

/// Fields absent from the document keep their defaults.
Json ga_to_json(const GaConfig& cfg);
GaConfig ga_from_json(const Json& doc);
Json fitness_to_json(const FitnessConfig& cfg);
FitnessConfig fitness_from_json(const Json& doc);
Json sim_to_json(const SimConfig& cfg);
SimConfig sim_from_json(const Json& doc);

Json atlas_to_json(const FieldAtlas& atlas);
FieldAtlas atlas_from_json(const Json& doc);

Json history_to_json(std::span<const GenerationStats> history);

/// Config echo, history and the best plan inline.
Json report_to_json(const EvolutionResult& result, const GaConfig& ga, const FitnessConfig& fit);

/// Rows mirror trace_csv; metrics are attached when given.
Json trace_to_json(const Trace& trace, const TraceMetrics* metrics = nullptr);
Json field_to_json(const FieldGrid& grid);

/// {"error": code, "message": ..., "node"?: index, "field"?: name}
Json error_to_json(const Error& e);

std::string history_csv(std::span<const GenerationStats> history);
std::string trace_csv(const Trace& trace);
std::string field_csv(const FieldGrid& grid);

/// Parses text, mapping syntax errors to Error{InvalidDocument}.
Json parse_json(std::string_view text);

Json read_json_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

} // namespace dribbleforge
