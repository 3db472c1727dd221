#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "stackpeg/value.hpp"

namespace stackpeg {

/// How an expression changes the value stack.
///
/// Both lists are ordered deepest-first: the rightmost element of `pops` is the
/// current top of stack (the first value popped) and the rightmost element of
/// `pushes` is the last value pushed.
struct StackEffect {
    std::vector<Tag> pops;
    std::vector<Tag> pushes;

    static StackEffect neutral() { return {}; }
    bool is_neutral() const noexcept { return pops.empty() && pushes.empty(); }

    friend bool operator==(const StackEffect&, const StackEffect&) = default;
};

/// `[A,B] -> [C]`
std::string to_string(const StackEffect& e);
std::string to_string(std::span<const Tag> tags);

enum class EffectErrorKind {
    effect_mismatch,
    branch_effect_mismatch,
    unsupported_repetition_effect,
    start_rule_pops,
    undeclared_recursive_rule,
};

std::string_view to_string(EffectErrorKind k);

struct EffectError {
    EffectErrorKind kind;
    std::string message;
    std::string rule;          // owning rule, when known
    std::size_t position = 0;  // mismatch: depth below top of stack (0 = top)
    Tag expected;
    Tag found;
    std::size_t alternative = 0;  // branch mismatch: offending alternative index
};

class effect_error : public std::runtime_error {
public:
    explicit effect_error(std::vector<EffectError> errors);
    const std::vector<EffectError>& errors() const noexcept { return errors_; }

private:
    std::vector<EffectError> errors_;
};

/// A value known to carry `found` may be popped where `expected` is wanted.
/// A wildcard pop accepts anything; a wildcard push is an unknown value and
/// satisfies only wildcard pops.
bool conforms(const Tag& found, const Tag& expected);

/// Whether a body with effect `actual` may stand for a rule declared `declared`.
bool conforms(const StackEffect& actual, const StackEffect& declared);

/// Sequential composition `lhs ~ rhs`. Throws effect_error(effect_mismatch) if
/// the values lhs leaves on top do not conform to what rhs pops.
StackEffect seq_compose(const StackEffect& lhs, const StackEffect& rhs);

/// All alternatives of a prioritized choice must share one effect shape. A
/// wildcard pop resolves to the more specific tag, a wildcard push makes the
/// pushed value unknown. Throws branch_effect_mismatch.
StackEffect choice_compose(std::span<const StackEffect> effects);

enum class RepetitionKind { optional, zero_or_more, one_or_more };

/// Typing of repetitions:
///   neutral body             -> neutral
///   reduction (pushes are a suffix of pops) -> (pushes, pushes), or the body itself for one_or_more
///   collecting ([], [t])     -> ([], [List<t>])
/// Anything else throws unsupported_repetition_effect.
StackEffect repetition_effect(const StackEffect& inner, RepetitionKind kind);

/// Element-wise unification of two effects of identical shape.
std::optional<StackEffect> unify(const StackEffect& a, const StackEffect& b);

} // namespace stackpeg
