#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pfto {

enum class ErrorKind {
    InvalidGeometry,
    Tagging,
    InternalConsistency,
    Lineage,
    Assembly,
    Solve,
    Config,
    Io,
};

[[nodiscard]] constexpr std::string_view to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::InvalidGeometry: return "invalid-geometry";
    case ErrorKind::Tagging: return "tagging";
    case ErrorKind::InternalConsistency: return "internal-consistency";
    case ErrorKind::Lineage: return "lineage";
    case ErrorKind::Assembly: return "assembly";
    case ErrorKind::Solve: return "solve";
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
    }
    return "unknown";
}

/// Single exception type for the library; `kind()` distinguishes the failure class.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind)
    {
    }

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace pfto
