#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stackpeg {

class Grammar;

struct Position {
    std::size_t index = 0;   // 0-based character offset
    std::size_t line = 1;    // 1-based
    std::size_t column = 1;  // 1-based

    friend bool operator==(const Position&, const Position&) = default;
};

Position position_of(std::string_view input, std::size_t index);

/// Named-rule frames from the start rule down to a failed terminal.
struct RuleTrace {
    std::vector<std::string> frames;
    std::string terminal;

    friend bool operator==(const RuleTrace&, const RuleTrace&) = default;
};

struct ParseError {
    Position position;
    Position principal_position;
    std::vector<RuleTrace> traces;

    /// Distinct terminal descriptors, first occurrence first.
    std::vector<std::string> expected() const;
};

/// Reruns the failed parse tracking mismatches; returns the furthest
/// terminal-mismatch position.
std::size_t establish_principal_error_index(const Grammar& g, std::string_view start, std::string_view input);

/// Reruns the failed parse collecting a trace for every non-quiet terminal
/// mismatch at `principal`.
std::vector<RuleTrace> collect_rule_traces(const Grammar& g, std::string_view start, std::string_view input,
                                           std::size_t principal);

/// Both phases, assembled.
ParseError analyze_failure(const Grammar& g, std::string_view start, std::string_view input);

struct FormatOptions {
    bool caret = true;
};

/// `Invalid input 'x', expected a, b or c (line L, column C):`, the offending
/// input line, and optionally a caret under the error column.
std::string format_error(const ParseError& err, std::string_view input, FormatOptions options = {});

} // namespace stackpeg
