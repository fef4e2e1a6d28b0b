#pragma once

#include <stdexcept>
#include <string>

namespace limid {

/// Base class for all errors raised by this library.
struct LimidError : std::runtime_error {
    explicit LimidError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input text; carries the 1-based line number.
struct ParseError : LimidError {
    int line;
    ParseError(int line_, const std::string& msg)
        : LimidError("line " + std::to_string(line_) + ": " + msg), line(line_) {}
};

/// Well-formed text with inconsistent content (unknown names, wrong table lengths).
struct SemanticError : LimidError {
    using LimidError::LimidError;
};

/// A model failed validation where a valid model is required.
struct InvalidModel : LimidError {
    using LimidError::LimidError;
};

/// No total decision order is derivable and none was declared (or the declared
/// order contradicts a directed path).
struct UnorderableDecisions : LimidError {
    using LimidError::LimidError;
};

/// The triangulated width exceeds the configured limit.
struct TreewidthExceeded : LimidError {
    int width;
    int limit;
    TreewidthExceeded(int width_, int limit_)
        : LimidError("relaxed treewidth " + std::to_string(width_) +
                     " exceeds limit " + std::to_string(limit_)),
          width(width_), limit(limit_) {}
};

/// An enumeration would exceed the configured cap.
struct TooLarge : LimidError {
    using LimidError::LimidError;
};

/// Evidence pushed out of sequence.
struct StaleOrder : LimidError {
    using LimidError::LimidError;
};

/// pop_evidence on an empty stack.
struct EmptyStack : LimidError {
    EmptyStack() : LimidError("evidence stack is empty") {}
};

}  // namespace limid
