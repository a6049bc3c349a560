#include "tailcovar/error.hpp"

namespace tailcovar {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::NonFinite: return "NonFinite";
        case ErrorCode::TooShort: return "TooShort";
        case ErrorCode::NonPositiveThreshold: return "NonPositiveThreshold";
        case ErrorCode::BadK: return "BadK";
        case ErrorCode::BadLevel: return "BadLevel";
        case ErrorCode::RegionTooLarge: return "RegionTooLarge";
        case ErrorCode::ThetaOutOfBox: return "ThetaOutOfBox";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::DegenerateMoments: return "DegenerateMoments";
        case ErrorCode::NoRoot: return "NoRoot";
        case ErrorCode::BadEta: return "BadEta";
        case ErrorCode::Unsupported: return "Unsupported";
        case ErrorCode::EtaStarOutOfRange: return "EtaStarOutOfRange";
        case ErrorCode::BadSpec: return "BadSpec";
        case ErrorCode::RootFail: return "RootFail";
        case ErrorCode::TooFewExceedances: return "TooFewExceedances";
        case ErrorCode::WindowTooShort: return "WindowTooShort";
        case ErrorCode::BadInput: return "BadInput";
    }
    return "Unknown";
}

}  // namespace tailcovar
