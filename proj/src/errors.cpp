#include "stackpeg/errors.hpp"

#include <algorithm>

#include "stackpeg/engine.hpp"

namespace stackpeg {

Position position_of(std::string_view input, std::size_t index) {
    index = std::min(index, input.size());
    Position p{index, 1, 1};
    std::size_t line_start = 0;
    for (std::size_t i = 0; i < index; ++i)
        if (input[i] == '\n') {
            ++p.line;
            line_start = i + 1;
        }
    p.column = index - line_start + 1;
    return p;
}

std::vector<std::string> ParseError::expected() const {
    std::vector<std::string> out;
    for (const auto& t : traces)
        if (std::find(out.begin(), out.end(), t.terminal) == out.end())
            out.push_back(t.terminal);
    return out;
}

std::size_t establish_principal_error_index(const Grammar& g, std::string_view start, std::string_view input) {
    EngineOptions opts;
    opts.error_mode = ErrorMode::track_max;
    ParserState state(input, std::move(opts));
    match_expr(state, rules::ref(std::string(start)), g);
    return state.stats.max_cursor;
}

std::vector<RuleTrace> collect_rule_traces(const Grammar& g, std::string_view start, std::string_view input,
                                           std::size_t principal) {
    EngineOptions opts;
    opts.error_mode = ErrorMode::collect_traces;
    opts.principal_index = principal;
    ParserState state(input, std::move(opts));
    match_expr(state, rules::ref(std::string(start)), g);
    return state.traces();
}

ParseError analyze_failure(const Grammar& g, std::string_view start, std::string_view input) {
    auto principal = establish_principal_error_index(g, start, input);
    ParseError err;
    err.position = position_of(input, principal);
    err.principal_position = err.position;
    err.traces = collect_rule_traces(g, start, input, principal);
    return err;
}

std::string format_error(const ParseError& err, std::string_view input, FormatOptions options) {
    const auto& pos = err.position;
    std::string out;
    if (pos.index >= input.size())
        out = "Unexpected end of input";
    else
        out = "Invalid input " + quote(input.substr(pos.index, 1), '\'');

    auto expected = err.expected();
    out += ", expected ";
    if (expected.empty()) {
        out += "<nothing>";
    } else {
        for (std::size_t i = 0; i < expected.size(); ++i) {
            if (i > 0)
                out += i + 1 == expected.size() ? " or " : ", ";
            out += expected[i];
        }
    }
    out += " (line " + std::to_string(pos.line) + ", column " + std::to_string(pos.column) + "):\n";

    const std::size_t index = std::min(pos.index, input.size());
    const std::size_t begin = index - (pos.column - 1);
    std::size_t end = input.find('\n', index);
    if (end == std::string_view::npos)
        end = input.size();
    out.append(input.substr(begin, end - begin));
    if (options.caret) {
        out += '\n';
        out.append(pos.column - 1, ' ');
        out += '^';
    }
    return out;
}

} // namespace stackpeg
