#pragma once

#include <stdexcept>
#include <string>

namespace ragopt {

// Malformed input files (corpus lines, config text, fixture JSON).
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Well-formed input that violates a contract (duplicate ids, bad ranges,
// misaligned rankings).
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class OracleErrorKind {
    Timeout,
    Malformed,
    InvariantViolation,
    Unavailable,
};

// Failures of an external oracle (embedder / generator / verifier). Kept
// distinct from low rewards and from validation of our own inputs.
class OracleError : public std::runtime_error {
public:
    OracleError(OracleErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}

    OracleErrorKind kind() const { return kind_; }

private:
    OracleErrorKind kind_;
};

inline const char* to_string(OracleErrorKind k) {
    switch (k) {
        case OracleErrorKind::Timeout: return "timeout";
        case OracleErrorKind::Malformed: return "malformed";
        case OracleErrorKind::InvariantViolation: return "invariant_violation";
        case OracleErrorKind::Unavailable: return "unavailable";
    }
    return "unknown";
}

} // namespace ragopt
