#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stackpeg/grammar.hpp"
#include "stackpeg/stack_effect.hpp"

namespace stackpeg {

/// Per-rule inferred effects, in definition order.
struct EffectReport {
    std::vector<std::pair<std::string, StackEffect>> rules;

    const StackEffect* find(std::string_view name) const;
};

/// Infers the effect of `e`. References to rules with declared effects use the
/// declaration; undeclared references are inferred through, and must not be
/// recursive. Throws effect_error.
StackEffect primitive_effect(const RuleExpr& e, const Grammar& g);

/// Infers and checks every rule, and that `start` (default: the grammar's
/// start rule) pops nothing. Throws effect_error with every problem found.
EffectReport check_grammar(const Grammar& g, std::optional<std::string> start = std::nullopt);

/// Marks repetitions whose body pushes exactly one value (and pops none) as
/// collecting, so they produce a single List value.
Grammar elaborate_collecting(const Grammar& g);

} // namespace stackpeg
