#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ammknn {

enum class ErrorCode {
    FileNotFound,
    MissingHeader,
    MalformedCsv,
    UnknownTargetColumn,
    NonNumericCell,
    MissingValue,
    DuplicateColumnName,
    UnknownColumn,
    NameCollision,
    ZeroVarianceColumn,
    ColumnMismatch,
    LengthMismatch,
    ConstantInput,
    DimensionMismatch,
    EmptyTrainingSet,
    KTooLarge,
    EmptyInput,
    EmptyMatrix,
    UnsortedCutoffs,
    InvalidSpec,
    InvalidFraction,
    InvalidConfig,
    MalformedReport,
    InvariantViolation,
};

std::string_view to_string(ErrorCode code) noexcept;

// Process exit codes used by the command-line tool.
enum class ExitCode : int {
    Ok = 0,
    ConfigError = 2,
    DataError = 3,
    InternalError = 4,
};

ExitCode exit_code_for(ErrorCode code) noexcept;

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

    /// Re-raise with extra context prepended ("fold 3: ...").
    Error with_context(std::string_view context) const;

private:
    ErrorCode code_;
};

} // namespace ammknn
