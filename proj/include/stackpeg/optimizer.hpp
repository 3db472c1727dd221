#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stackpeg/grammar.hpp"

namespace stackpeg {

struct RewritePass {
    std::string name;
    std::function<Grammar(const Grammar&)> transform;
};

/// Splices nested sequences and choices into their parent, and merges runs of
/// adjacent Ch/Str children of a sequence into one Str.
Grammar flatten_chains(const Grammar& g);

/// Replaces character classes, and runs of single-character alternatives in a
/// choice, with ASCII bitmask matchers. Classes with custom high-byte
/// membership are left alone.
Grammar compile_charsets(const Grammar& g);

/// Str becomes UnrolledStr, which compares and advances one character at a time.
Grammar specialize_literals(const Grammar& g);

/// Replaces references to non-recursive rules with the rule body.
Grammar inline_rules(const Grammar& g);

/// flatten_chains, compile_charsets, specialize_literals.
std::vector<RewritePass> default_passes();

/// All passes, by name: the defaults plus inline_rules.
std::vector<RewritePass> all_passes();

std::optional<RewritePass> pass_by_name(std::string_view name);

Grammar optimize(const Grammar& g, const std::vector<RewritePass>& passes = default_passes());

} // namespace stackpeg
