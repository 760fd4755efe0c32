#pragma once

#include "dribbleforge/error.hpp"

#include <doctest.h>

#include <filesystem>
#include <string>

namespace support {

inline std::filesystem::path fixture(const std::string& name)
{
    return std::filesystem::path(DRIBBLEFORGE_FIXTURE_DIR) / name;
}

/// Runs fn and returns the thrown Error, failing the test if none is thrown.
template <class Fn>
dribbleforge::Error thrown_error(Fn&& fn)
{
    try {
        fn();
    } catch (const dribbleforge::Error& e) {
        return e;
    }
    FAIL("expected dribbleforge::Error");
    return dribbleforge::Error(dribbleforge::Errc::InvalidDocument, "unreachable");
}

template <class Fn>
dribbleforge::Errc error_code_of(Fn&& fn)
{
    return thrown_error(std::forward<Fn>(fn)).code();
}

} // namespace support
