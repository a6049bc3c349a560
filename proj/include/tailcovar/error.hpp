#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tailcovar {

enum class ErrorCode {
    NonFinite,
    TooShort,
    NonPositiveThreshold,
    BadK,
    BadLevel,
    RegionTooLarge,
    ThetaOutOfBox,
    NoConvergence,
    DegenerateMoments,
    NoRoot,
    BadEta,
    Unsupported,
    EtaStarOutOfRange,
    BadSpec,
    RootFail,
    TooFewExceedances,
    WindowTooShort,
    BadInput,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI) can map it without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace tailcovar
