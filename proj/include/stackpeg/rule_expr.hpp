#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "stackpeg/char_predicate.hpp"
#include "stackpeg/stack_effect.hpp"
#include "stackpeg/value.hpp"

namespace stackpeg {

class RuleExpr;
using ExprPtr = std::shared_ptr<const RuleExpr>;

/// What an action function sees besides its arguments.
struct ActionContext {
    std::string_view input;
    std::size_t cursor = 0;
};

/// Returns the values to push, or nullopt to make the action (and so the
/// enclosing match) fail. Throwing is an internal fault, not a parse failure.
using ActionFn = std::function<std::optional<std::vector<Value>>(std::span<const Value> args, const ActionContext&)>;

struct ActionDef {
    std::string name;
    StackEffect effect;
    ActionFn fn;

    std::size_t arity() const noexcept { return effect.pops.size(); }
};

namespace node {

struct Ch { char c; };
struct IgnoreCaseCh { char c; };         // stored lower-cased
struct Str { std::string text; };
struct IgnoreCaseStr { std::string text; };  // stored lower-cased
struct CharPred { CharPredicate pred; };
struct AnyChar {};
struct AnyOf { std::string chars; CharPredicate pred; };
struct NoneOf { std::string chars; CharPredicate pred; };
struct EndOfInput {};
struct Sequence { std::vector<ExprPtr> items; };
struct FirstOf { std::vector<ExprPtr> alternatives; };
struct Repeat {
    RepetitionKind kind;
    ExprPtr inner;
    // Set when the body pushes one value per iteration and those values are
    // gathered into a single list value tagged List<collect>.
    std::optional<Tag> collect;
};
struct AndPredicate { ExprPtr inner; };
struct NotPredicate { ExprPtr inner; };
struct Capture { ExprPtr inner; Tag tag; };
struct Push { std::vector<Value> values; };
struct Drop { std::size_t count; };
struct Action { std::shared_ptr<const ActionDef> def; };
struct RuleRef { std::string name; };
struct Quiet { ExprPtr inner; };
// Optimizer-introduced.
struct UnrolledStr { std::string text; };
struct CharSetMask { AsciiMask mask; bool high; };

} // namespace node

class RuleExpr {
public:
    using Variant = std::variant<node::Ch, node::IgnoreCaseCh, node::Str, node::IgnoreCaseStr, node::CharPred,
                                 node::AnyChar, node::AnyOf, node::NoneOf, node::EndOfInput, node::Sequence,
                                 node::FirstOf, node::Repeat, node::AndPredicate, node::NotPredicate,
                                 node::Capture, node::Push, node::Drop, node::Action, node::RuleRef, node::Quiet,
                                 node::UnrolledStr, node::CharSetMask>;

    explicit RuleExpr(Variant v) : node_(std::move(v)) {}

    const Variant& node() const noexcept { return node_; }

    template <class T>
    const T* as() const noexcept { return std::get_if<T>(&node_); }
    template <class T>
    bool is() const noexcept { return std::holds_alternative<T>(node_); }

    /// Leaf matchers that inspect input directly.
    bool is_terminal() const noexcept;

private:
    Variant node_;
};

/// Rule-construction functions. Sequence and first_of collapse singletons.
namespace rules {

ExprPtr ch(char c);
ExprPtr ignore_case(char c);
ExprPtr str(std::string text);
ExprPtr ignore_case(std::string text);
ExprPtr pred(CharPredicate p);
ExprPtr any();
ExprPtr any_of(std::string chars);
ExprPtr none_of(std::string chars);
ExprPtr eoi();
ExprPtr seq(std::vector<ExprPtr> items);
ExprPtr first_of(std::vector<ExprPtr> alternatives);
ExprPtr optional(ExprPtr e);
ExprPtr zero_or_more(ExprPtr e);
ExprPtr one_or_more(ExprPtr e);
ExprPtr repeat(RepetitionKind kind, ExprPtr e, std::optional<Tag> collect = std::nullopt);
ExprPtr and_pred(ExprPtr e);
ExprPtr not_pred(ExprPtr e);
ExprPtr capture(ExprPtr e, Tag tag = tags::Str);
ExprPtr push(Value v);
ExprPtr push(std::vector<Value> values);
ExprPtr drop(std::size_t count = 1);
ExprPtr action(std::shared_ptr<const ActionDef> def);
ExprPtr action(std::string name, StackEffect effect, ActionFn fn);
ExprPtr ref(std::string name);
ExprPtr quiet(ExprPtr e);
ExprPtr unrolled_str(std::string text);
ExprPtr char_set(AsciiMask mask, bool high);

/// Node builder: pops `arity` values and pushes `label(v1, ..., vn)`.
ExprPtr cons(std::string label, std::size_t arity, Tag arg_tag = Tag::wildcard(), Tag out_tag = tags::Node);
std::shared_ptr<const ActionDef> cons_def(std::string label, std::size_t arity, Tag arg_tag, Tag out_tag);

} // namespace rules

/// Structural equality. Actions compare by name and effect, predicates by membership.
bool structural_equal(const ExprPtr& a, const ExprPtr& b);

/// Notation rendering (the same syntax grammar files use).
std::string to_notation(const RuleExpr& e);
inline std::string to_notation(const ExprPtr& e) { return to_notation(*e); }

/// How a terminal is named in "expected ..." lists.
std::string terminal_descriptor(const RuleExpr& e);

std::string lower(std::string_view s);

} // namespace stackpeg
