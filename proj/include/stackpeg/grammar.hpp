#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "stackpeg/rule_expr.hpp"
#include "stackpeg/stack_effect.hpp"

namespace stackpeg {

struct RuleDef {
    std::string name;
    ExprPtr expr;
    std::optional<StackEffect> declared_effect;
};

/// Named rules plus a designated start rule. The first rule added is the
/// default start.
class Grammar {
public:
    Grammar& add_rule(std::string name, ExprPtr expr, std::optional<StackEffect> declared = std::nullopt);
    Grammar& set_start(std::string name);

    const RuleDef* find(std::string_view name) const;
    const RuleDef& at(std::string_view name) const;
    bool contains(std::string_view name) const { return find(name) != nullptr; }

    std::span<const RuleDef> rules() const noexcept { return rules_; }
    const std::string& start() const noexcept { return start_; }

    /// Rebuilds every rule body through `fn`, keeping names, order, declarations and start.
    template <class Fn>
    Grammar map_rules(Fn&& fn) const {
        Grammar out;
        for (const auto& r : rules_)
            out.add_rule(r.name, fn(r), r.declared_effect);
        out.start_ = start_;
        return out;
    }

private:
    std::vector<RuleDef> rules_;
    std::unordered_map<std::string, std::size_t> index_;
    std::string start_;
};

bool structural_equal(const Grammar& a, const Grammar& b);

enum class DiagnosticKind {
    syntax,
    unresolved_ref,
    left_recursion,
    empty_literal,
    duplicate_rule,
    missing_start,
    effect,
};

std::string_view to_string(DiagnosticKind k);

struct Diagnostic {
    DiagnosticKind kind;
    std::string message;
    /// Rule names involved: the unresolved name, or the recursion cycle in call order.
    std::vector<std::string> names;
    /// Character offset into the grammar source, when known.
    std::optional<std::size_t> offset;
    /// Set for kind == effect.
    std::optional<EffectErrorKind> effect_kind;
};

class grammar_error : public std::runtime_error {
public:
    explicit grammar_error(std::vector<Diagnostic> diagnostics);
    const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

private:
    std::vector<Diagnostic> diagnostics_;
};

/// Resolves references, collapses singleton sequences and choices, rejects
/// empty literals and left recursion. Throws grammar_error listing every problem.
Grammar validate_grammar(const Grammar& g);

/// Whether `e` can succeed without consuming input, given per-rule nullability.
bool nullable(const RuleExpr& e, const std::unordered_map<std::string, bool>& rule_nullable);

/// Least-fixpoint nullability of every rule.
std::unordered_map<std::string, bool> nullable_rules(const Grammar& g);

} // namespace stackpeg
