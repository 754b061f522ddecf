#pragma once

#include <stdexcept>
#include <string>

namespace omniselect {

// Base class for every error the library raises deliberately.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// File could not be opened / read / written.
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

// Malformed on-disk content. `kind()` distinguishes the ingestion failures.
class FormatError : public Error {
public:
    enum class Kind {
        bad_magic,
        unsupported_version,
        unsupported_dtype,
        truncated_payload,
        non_finite_element,
        malformed_text,
    };

    FormatError(Kind kind, const std::string& msg) : Error(msg), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

// In-memory value violates a documented invariant (shape mismatch,
// inconsistent group spec, out-of-range index, ...).
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

// Numerically degenerate input: zero-norm vector, zero-mass distribution.
class DegenerateInputError : public Error {
public:
    explicit DegenerateInputError(const std::string& msg) : Error(msg) {}
};

// A condition the library promises can never happen. Maps to exit code 2.
class InternalError : public Error {
public:
    explicit InternalError(const std::string& msg) : Error(msg) {}
};

} // namespace omniselect
