#include "maintcast/error.hpp"

namespace maintcast {

std::string_view errc_name(Errc code) noexcept {
    switch (code) {
        case Errc::MalformedRecord: return "MalformedRecord";
        case Errc::InvalidDate: return "InvalidDate";
        case Errc::DuplicateRepo: return "DuplicateRepo";
        case Errc::InconsistentDates: return "InconsistentDates";
        case Errc::UnknownRepo: return "UnknownRepo";
        case Errc::AuthFailure: return "AuthFailure";
        case Errc::RateLimited: return "RateLimited";
        case Errc::RepoNotFound: return "RepoNotFound";
        case Errc::TransportError: return "TransportError";
        case Errc::MixedRepos: return "MixedRepos";
        case Errc::EmptySelection: return "EmptySelection";
        case Errc::TooShort: return "TooShort";
        case Errc::EmptySampleSet: return "EmptySampleSet";
        case Errc::EmptyTrainingSet: return "EmptyTrainingSet";
        case Errc::SingularSystem: return "SingularSystem";
        case Errc::ShapeMismatch: return "ShapeMismatch";
        case Errc::KindMismatch: return "KindMismatch";
        case Errc::LengthMismatch: return "LengthMismatch";
        case Errc::UnknownLabel: return "UnknownLabel";
        case Errc::InsufficientHistory: return "InsufficientHistory";
        case Errc::InvalidSpec: return "InvalidSpec";
        case Errc::MissingAuthorField: return "MissingAuthorField";
        case Errc::InvalidConfig: return "InvalidConfig";
        case Errc::Io: return "Io";
        case Errc::LeakageDetected: return "LeakageDetected";
        case Errc::InvariantViolation: return "InvariantViolation";
    }
    return "Unknown";
}

ErrorCategory category_of(Errc code) noexcept {
    switch (code) {
        case Errc::InvalidConfig:
            return ErrorCategory::Usage;
        case Errc::LeakageDetected:
        case Errc::InvariantViolation:
            return ErrorCategory::Internal;
        default:
            return ErrorCategory::Data;
    }
}

Error::Error(Errc code, const std::string& message, std::int64_t detail)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code), detail_(detail) {}

}  // namespace maintcast
