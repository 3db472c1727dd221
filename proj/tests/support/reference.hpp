#pragma once

// A second interpreter, written directly from the triple relation
// (e, x, S) => (n, o, S'). It shares only the tree and value types with the
// engine: no journaled stack, no snapshots. Every expression works on its own
// copy of the stack and failure simply discards it.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "stackpeg/engine.hpp"
#include "stackpeg/grammar.hpp"

namespace oracle {

struct Outcome {
    enum Kind { success, failure, underflow, tag_mismatch, other_fault } kind = failure;
    std::size_t cursor = 0;
    std::vector<stackpeg::Value> stack;
    std::size_t steps = 0;  // the n of the relation

    friend bool operator==(const Outcome& a, const Outcome& b) {
        return a.kind == b.kind && a.cursor == b.cursor && a.stack == b.stack;
    }
};

std::string describe(const Outcome& o);

/// The reference result of matching `e` from position 0 of `input`.
Outcome evaluate(const stackpeg::Grammar& g, const stackpeg::ExprPtr& e, std::string_view input);

/// The engine's result for the same question, in the same shape.
Outcome engine(const stackpeg::Grammar& g, const stackpeg::ExprPtr& e, std::string_view input);

} // namespace oracle
