#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gal {

enum class ErrorKind {
    format,       // structurally malformed input document
    row,          // a single record failed to parse or violated an invariant
    conflict,     // duplicate keys / ids
    alignment,    // georeference or date alignment mismatch
    unit,         // implausible unit (e.g. celsius where kelvin expected)
    precondition, // caller broke an operation's contract
    schema,       // unknown slot / config key
    runtime,      // I/O, network, anything not caused by bad input
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    /// Process exit status for this error: 1 for runtime failures, 2 for
    /// input or validation failures.
    int exit_status() const noexcept { return kind_ == ErrorKind::runtime ? 1 : 2; }

private:
    ErrorKind kind_;
};

/// Row-level parse failure. `row` is the 1-based data row (header excluded).
class RowError : public Error {
public:
    RowError(std::size_t row, const std::string& message)
        : Error(ErrorKind::row, "row " + std::to_string(row) + ": " + message), row_(row) {}

    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

inline void require(bool cond, const std::string& message) {
    if (!cond) throw Error(ErrorKind::precondition, message);
}

} // namespace gal
