#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "stackpeg/errors.hpp"
#include "stackpeg/grammar.hpp"
#include "stackpeg/rule_expr.hpp"
#include "stackpeg/value_stack.hpp"

namespace stackpeg {

enum class ErrorMode { off, track_max, collect_traces };

struct EngineStats {
    std::uint64_t steps = 0;                // match_expr entries
    std::uint64_t terminal_mismatches = 0;
    std::size_t max_cursor = 0;             // furthest terminal mismatch
    std::size_t max_matched = 0;            // furthest cursor after a terminal match
    std::uint64_t reentries = 0;            // same rule re-entered at the same cursor (detect_reentry only)
};

/// One record of the instrumented event log.
struct TraceEvent {
    enum class Kind { enter, match, mismatch, reset };

    std::size_t step = 0;
    std::string expr;
    std::size_t cursor = 0;        // cursor when the event happened (entry cursor for exits)
    Kind kind = Kind::enter;
    std::size_t cursor_after = 0;  // match: end of the match; reset: restored position
};

/// `step <n>: <expr> @ <cursor> -> enter | match (cursor <k>) | mismatch | reset (cursor <k>)`
std::string format_event(const TraceEvent& e);

using EventSink = std::function<void(const TraceEvent&)>;

struct EngineOptions {
    ErrorMode error_mode = ErrorMode::off;
    /// Only used with ErrorMode::collect_traces.
    std::size_t principal_index = 0;
    EventSink events;
    bool detect_reentry = false;
    std::size_t max_depth = 10000;
};

enum class FaultKind { action_exception, stack_underflow, tag_mismatch, depth_limit, unresolved_rule };

std::string_view to_string(FaultKind k);

/// A run that could not complete for a reason other than non-matching input.
class internal_fault : public std::runtime_error {
public:
    internal_fault(FaultKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    FaultKind kind() const noexcept { return kind_; }

private:
    FaultKind kind_;
};

/// Input, cursor, value stack and instrumentation for one parse run.
class ParserState {
public:
    explicit ParserState(std::string_view input, EngineOptions options = {});

    std::string_view input;
    std::size_t cursor = 0;
    ValueStack stack;
    EngineStats stats;
    EngineOptions options;

    /// Traces gathered in collect_traces mode, deduplicated, first occurrence first.
    const std::vector<RuleTrace>& traces() const noexcept { return traces_; }

private:
    friend class Interpreter;
    std::vector<RuleTrace> traces_;
    std::set<std::string> trace_keys_;
};

/// Matches `e` at the state's cursor. On false, cursor and stack are back at
/// their entry values. Throws internal_fault.
bool match_expr(ParserState& state, const ExprPtr& e, const Grammar& g);

struct Success {
    std::vector<Value> values;  // final stack, bottom to top
};
struct ParseFailure {
    ParseError error;
};
struct InternalFault {
    FaultKind kind;
    std::string description;
};

struct RunResult {
    std::variant<Success, ParseFailure, InternalFault> outcome;
    EngineStats stats;  // of the initial run

    bool ok() const noexcept { return std::holds_alternative<Success>(outcome); }
};

struct RunOptions {
    EventSink events;  // receives the initial run only
    std::size_t max_depth = 10000;
};

/// Runs `start` (default: the grammar's start rule) against `input`. On a
/// failed match, reruns to locate the principal error and collect traces.
RunResult run(const Grammar& g, std::string_view input, std::optional<std::string> start = std::nullopt,
              const RunOptions& options = {});

/// Thrown by the raising delivery scheme on non-matching input.
class parse_error_exception : public std::runtime_error {
public:
    explicit parse_error_exception(ParseError e);
    const ParseError& error() const noexcept { return error_; }

private:
    ParseError error_;
};

/// Success-or-error union: the value, or the exception a raising run would throw.
template <class T>
class Try {
public:
    static Try success(T v) { return Try(std::move(v)); }
    static Try failure(std::exception_ptr e) { return Try(std::move(e)); }

    bool ok() const noexcept { return state_.index() == 0; }
    const T& value() const {
        if (!ok())
            std::rethrow_exception(std::get<1>(state_));
        return std::get<0>(state_);
    }
    std::exception_ptr error() const { return ok() ? nullptr : std::get<1>(state_); }

private:
    explicit Try(T v) : state_(std::in_place_index<0>, std::move(v)) {}
    explicit Try(std::exception_ptr e) : state_(std::in_place_index<1>, std::move(e)) {}
    std::variant<T, std::exception_ptr> state_;
};

/// Two-sided union: a parse error on the left, values on the right.
template <class L, class R>
class Either {
public:
    static Either left(L l) { return Either(std::in_place_index<0>, std::move(l)); }
    static Either right(R r) { return Either(std::in_place_index<1>, std::move(r)); }

    bool is_left() const noexcept { return v_.index() == 0; }
    bool is_right() const noexcept { return v_.index() == 1; }
    const L& get_left() const { return std::get<0>(v_); }
    const R& get_right() const { return std::get<1>(v_); }

private:
    template <std::size_t I, class X>
    Either(std::in_place_index_t<I> i, X&& x) : v_(i, std::forward<X>(x)) {}
    std::variant<L, R> v_;
};

/// Delivery schemes: each maps the three run outcomes onto its own result type.
namespace delivery {

struct TryScheme {
    using result = Try<std::vector<Value>>;
    static result success(std::vector<Value> v) { return result::success(std::move(v)); }
    static result parse_error(ParseError e) {
        return result::failure(std::make_exception_ptr(parse_error_exception(std::move(e))));
    }
    static result failure(const InternalFault& f) {
        return result::failure(std::make_exception_ptr(internal_fault(f.kind, f.description)));
    }
};

/// Parse errors go left; internal faults are raised.
struct EitherScheme {
    using result = Either<ParseError, std::vector<Value>>;
    static result success(std::vector<Value> v) { return result::right(std::move(v)); }
    static result parse_error(ParseError e) { return result::left(std::move(e)); }
    [[noreturn]] static result failure(const InternalFault& f) { throw internal_fault(f.kind, f.description); }
};

struct ThrowScheme {
    using result = std::vector<Value>;
    static result success(std::vector<Value> v) { return v; }
    [[noreturn]] static result parse_error(ParseError e) { throw parse_error_exception(std::move(e)); }
    [[noreturn]] static result failure(const InternalFault& f) { throw internal_fault(f.kind, f.description); }
};

} // namespace delivery

template <class Scheme>
typename Scheme::result run_with(const Grammar& g, std::string_view input, std::optional<std::string> start = std::nullopt,
                                 const RunOptions& options = {}) {
    auto r = run(g, input, std::move(start), options);
    if (auto* s = std::get_if<Success>(&r.outcome))
        return Scheme::success(std::move(s->values));
    if (auto* f = std::get_if<ParseFailure>(&r.outcome))
        return Scheme::parse_error(std::move(f->error));
    return Scheme::failure(std::get<InternalFault>(r.outcome));
}

} // namespace stackpeg
