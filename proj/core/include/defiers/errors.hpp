#pragma once

#include <stdexcept>
#include <string>

namespace defiers {

enum class ErrorCode {
    InvalidDistribution,
    InvalidQuantile,
    RelevanceViolated,
    InfeasibleDefierShare,
    OutsideRegion,
    WrongModel,
    InvalidBandwidth,
    MonotonicityRequired,
    InsufficientReplications,
    VarianceDegenerate,
    InvalidStrata,
    InvalidSpec,
    MalformedRow,
    MissingColumn,
    EmptyArm,
    InvalidConfig,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// Carries the 1-based line number of the offending CSV row.
class MalformedRowError : public Error {
public:
    MalformedRowError(long line, const std::string& what)
        : Error(ErrorCode::MalformedRow, "line " + std::to_string(line) + ": " + what), line_(line) {}

    long line() const noexcept { return line_; }

private:
    long line_;
};

}  // namespace defiers
