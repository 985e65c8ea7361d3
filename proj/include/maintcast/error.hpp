#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace maintcast {

enum class Errc {
    MalformedRecord,
    InvalidDate,
    DuplicateRepo,
    InconsistentDates,
    UnknownRepo,
    AuthFailure,
    RateLimited,
    RepoNotFound,
    TransportError,
    MixedRepos,
    EmptySelection,
    TooShort,
    EmptySampleSet,
    EmptyTrainingSet,
    SingularSystem,
    ShapeMismatch,
    KindMismatch,
    LengthMismatch,
    UnknownLabel,
    InsufficientHistory,
    InvalidSpec,
    MissingAuthorField,
    InvalidConfig,
    Io,
    LeakageDetected,
    InvariantViolation,
};

/// Maps onto the CLI exit codes (1 usage, 2 data, 3 internal).
enum class ErrorCategory { Usage = 1, Data = 2, Internal = 3 };

std::string_view errc_name(Errc code) noexcept;
ErrorCategory category_of(Errc code) noexcept;

/// Single exception type for every module. `detail` carries the line number
/// for parse errors and the retry delay in seconds for RateLimited.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message, std::int64_t detail = 0);

    Errc code() const noexcept { return code_; }
    std::int64_t detail() const noexcept { return detail_; }
    ErrorCategory category() const noexcept { return category_of(code_); }

private:
    Errc code_;
    std::int64_t detail_;
};

}  // namespace maintcast
