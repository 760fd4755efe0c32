#include "dribbleforge/error.hpp"

#include <utility>

namespace dribbleforge {

std::string_view to_string(Errc code)
{
    switch (code) {
    case Errc::TooFewPoints: return "TooFewPoints";
    case Errc::DegenerateInput: return "DegenerateInput";
    case Errc::TooFewNodes: return "TooFewNodes";
    case Errc::DegenerateLayout: return "DegenerateLayout";
    case Errc::ParamOutOfRange: return "ParamOutOfRange";
    case Errc::UnknownNode: return "UnknownNode";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::EmptyPopulation: return "EmptyPopulation";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::EmptyTrace: return "EmptyTrace";
    case Errc::EmptyAnchors: return "EmptyAnchors";
    case Errc::LayoutMismatch: return "LayoutMismatch";
    case Errc::CoincidentGoalObstacle: return "CoincidentGoalObstacle";
    case Errc::InvalidDocument: return "InvalidDocument";
    }
    return "Unknown";
}

Error::Error(Errc code, const std::string& message, std::optional<std::size_t> node,
             std::string field)
    : std::runtime_error(std::string(to_string(code)) + ": " + message)
    , code_(code)
    , node_(node)
    , field_(std::move(field))
{}

} // namespace dribbleforge
