#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dribbleforge {

enum class Errc {
    TooFewPoints,
    DegenerateInput,
    TooFewNodes,
    DegenerateLayout,
    ParamOutOfRange,
    UnknownNode,
    LengthMismatch,
    EmptyPopulation,
    InvalidConfig,
    EmptyTrace,
    EmptyAnchors,
    LayoutMismatch,
    CoincidentGoalObstacle,
    InvalidDocument,
};

std::string_view to_string(Errc code);

/// Error raised by every module of the library. Carries a machine-readable
/// code plus, where one applies, the offending node index and field name.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message,
          std::optional<std::size_t> node = std::nullopt, std::string field = {});

    Errc code() const noexcept { return code_; }
    std::optional<std::size_t> node() const noexcept { return node_; }
    const std::string& field() const noexcept { return field_; }

private:
    Errc code_;
    std::optional<std::size_t> node_;
    std::string field_;
};

} // namespace dribbleforge
