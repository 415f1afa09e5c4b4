#include "ammknn/error.hpp"

namespace ammknn {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::MissingHeader: return "MissingHeader";
    case ErrorCode::MalformedCsv: return "MalformedCsv";
    case ErrorCode::UnknownTargetColumn: return "UnknownTargetColumn";
    case ErrorCode::NonNumericCell: return "NonNumericCell";
    case ErrorCode::MissingValue: return "MissingValue";
    case ErrorCode::DuplicateColumnName: return "DuplicateColumnName";
    case ErrorCode::UnknownColumn: return "UnknownColumn";
    case ErrorCode::NameCollision: return "NameCollision";
    case ErrorCode::ZeroVarianceColumn: return "ZeroVarianceColumn";
    case ErrorCode::ColumnMismatch: return "ColumnMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ConstantInput: return "ConstantInput";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::UnsortedCutoffs: return "UnsortedCutoffs";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::InvalidFraction: return "InvalidFraction";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::MalformedReport: return "MalformedReport";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    }
    return "Unknown";
}

ExitCode exit_code_for(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::UnknownTargetColumn:
    case ErrorCode::UnknownColumn:
    case ErrorCode::NameCollision:
    case ErrorCode::InvalidSpec:
    case ErrorCode::InvalidFraction:
    case ErrorCode::InvalidConfig:
    case ErrorCode::UnsortedCutoffs:
        return ExitCode::ConfigError;
    case ErrorCode::InvariantViolation:
        return ExitCode::InternalError;
    default:
        return ExitCode::DataError;
    }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

Error Error::with_context(std::string_view context) const {
    // Strip our own "Code: " prefix so it is not repeated.
    std::string_view msg = what();
    const auto prefix = std::string(to_string(code_)) + ": ";
    if (msg.starts_with(prefix)) msg.remove_prefix(prefix.size());
    return Error(code_, std::string(context) + ": " + std::string(msg));
}

} // namespace ammknn
