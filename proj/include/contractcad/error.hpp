#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ccad {

enum class ErrorKind {
    UnknownId,
    RankViolation,
    DuplicateId,
    InvalidArgument,
    TemplateParse,
    MissingRationale,
    LineageMismatch,
    EmptyEnum,
    TypeMismatch,
    NotIncluded,
    UnboundParameter,
    DanglingReference,
    StructuralFault,
    EmptyLog,
    BadIndex,
    DifferentGeneric,
    TooLarge,
    InvalidRule,
    Io,
    HashMismatch,
    UnsupportedSchema,
    ManifestParse,
    NotFound,
    Finalized,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library. Faults that the operations treat as
/// data (structure faults, check reports, blockers) are returned, not thrown.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace ccad
