#include "stackpeg/rule_expr.hpp"

#include <cctype>
#include <stdexcept>

namespace stackpeg {

namespace {

template <class... Ts>
struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

ExprPtr make(RuleExpr::Variant v) { return std::make_shared<const RuleExpr>(std::move(v)); }

} // namespace

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool RuleExpr::is_terminal() const noexcept {
    return std::visit(overloaded{
                          [](const node::Ch&) { return true; },
                          [](const node::IgnoreCaseCh&) { return true; },
                          [](const node::Str&) { return true; },
                          [](const node::IgnoreCaseStr&) { return true; },
                          [](const node::CharPred&) { return true; },
                          [](const node::AnyChar&) { return true; },
                          [](const node::AnyOf&) { return true; },
                          [](const node::NoneOf&) { return true; },
                          [](const node::EndOfInput&) { return true; },
                          [](const node::UnrolledStr&) { return true; },
                          [](const node::CharSetMask&) { return true; },
                          [](const auto&) { return false; },
                      },
                      node_);
}

namespace rules {

ExprPtr ch(char c) { return make(node::Ch{c}); }
ExprPtr ignore_case(char c) {
    return make(node::IgnoreCaseCh{static_cast<char>(std::tolower(static_cast<unsigned char>(c)))});
}
ExprPtr str(std::string text) { return make(node::Str{std::move(text)}); }
ExprPtr ignore_case(std::string text) { return make(node::IgnoreCaseStr{lower(text)}); }
ExprPtr pred(CharPredicate p) { return make(node::CharPred{std::move(p)}); }
ExprPtr any() { return make(node::AnyChar{}); }
ExprPtr any_of(std::string chars) {
    auto p = CharPredicate::from_chars(chars);
    return make(node::AnyOf{std::move(chars), std::move(p)});
}
ExprPtr none_of(std::string chars) {
    auto p = CharPredicate::from_chars(chars).negated();
    return make(node::NoneOf{std::move(chars), std::move(p)});
}
ExprPtr eoi() { return make(node::EndOfInput{}); }

ExprPtr seq(std::vector<ExprPtr> items) {
    if (items.empty())
        throw std::invalid_argument("sequence needs at least one element");
    if (items.size() == 1)
        return std::move(items.front());
    return make(node::Sequence{std::move(items)});
}

ExprPtr first_of(std::vector<ExprPtr> alternatives) {
    if (alternatives.empty())
        throw std::invalid_argument("first_of needs at least one alternative");
    if (alternatives.size() == 1)
        return std::move(alternatives.front());
    return make(node::FirstOf{std::move(alternatives)});
}

ExprPtr repeat(RepetitionKind kind, ExprPtr e, std::optional<Tag> collect) {
    return make(node::Repeat{kind, std::move(e), std::move(collect)});
}
ExprPtr optional(ExprPtr e) { return repeat(RepetitionKind::optional, std::move(e)); }
ExprPtr zero_or_more(ExprPtr e) { return repeat(RepetitionKind::zero_or_more, std::move(e)); }
ExprPtr one_or_more(ExprPtr e) { return repeat(RepetitionKind::one_or_more, std::move(e)); }
ExprPtr and_pred(ExprPtr e) { return make(node::AndPredicate{std::move(e)}); }
ExprPtr not_pred(ExprPtr e) { return make(node::NotPredicate{std::move(e)}); }
ExprPtr capture(ExprPtr e, Tag tag) { return make(node::Capture{std::move(e), std::move(tag)}); }
ExprPtr push(Value v) { return make(node::Push{{std::move(v)}}); }
ExprPtr push(std::vector<Value> values) { return make(node::Push{std::move(values)}); }

ExprPtr drop(std::size_t count) {
    if (count == 0)
        throw std::invalid_argument("drop count must be positive");
    return make(node::Drop{count});
}

ExprPtr action(std::shared_ptr<const ActionDef> def) {
    if (!def || !def->fn)
        throw std::invalid_argument("action needs a function");
    return make(node::Action{std::move(def)});
}

ExprPtr action(std::string name, StackEffect effect, ActionFn fn) {
    return action(std::make_shared<const ActionDef>(ActionDef{std::move(name), std::move(effect), std::move(fn)}));
}

ExprPtr ref(std::string name) { return make(node::RuleRef{std::move(name)}); }
ExprPtr quiet(ExprPtr e) { return make(node::Quiet{std::move(e)}); }
ExprPtr unrolled_str(std::string text) { return make(node::UnrolledStr{std::move(text)}); }
ExprPtr char_set(AsciiMask mask, bool high) { return make(node::CharSetMask{mask, high}); }

std::shared_ptr<const ActionDef> cons_def(std::string label, std::size_t arity, Tag arg_tag, Tag out_tag) {
    StackEffect effect{std::vector<Tag>(arity, arg_tag), {out_tag}};
    std::string name = "cons(" + label + "," + std::to_string(arity) + ")";
    ActionFn fn = [label = std::move(label), out_tag](std::span<const Value> args, const ActionContext&) {
        return std::optional<std::vector<Value>>{
            std::vector<Value>{Value::node(out_tag, label, std::vector<Value>(args.begin(), args.end()))}};
    };
    return std::make_shared<const ActionDef>(ActionDef{std::move(name), std::move(effect), std::move(fn)});
}

ExprPtr cons(std::string label, std::size_t arity, Tag arg_tag, Tag out_tag) {
    return action(cons_def(std::move(label), arity, std::move(arg_tag), std::move(out_tag)));
}

} // namespace rules

bool structural_equal(const ExprPtr& a, const ExprPtr& b) {
    if (a == b)
        return true;
    if (!a || !b || a->node().index() != b->node().index())
        return false;
    auto all_equal = [](const std::vector<ExprPtr>& x, const std::vector<ExprPtr>& y) {
        if (x.size() != y.size())
            return false;
        for (std::size_t i = 0; i < x.size(); ++i)
            if (!structural_equal(x[i], y[i]))
                return false;
        return true;
    };
    const auto& bn = b->node();
    return std::visit(
        overloaded{
            [&](const node::Ch& n) { return n.c == std::get<node::Ch>(bn).c; },
            [&](const node::IgnoreCaseCh& n) { return n.c == std::get<node::IgnoreCaseCh>(bn).c; },
            [&](const node::Str& n) { return n.text == std::get<node::Str>(bn).text; },
            [&](const node::IgnoreCaseStr& n) { return n.text == std::get<node::IgnoreCaseStr>(bn).text; },
            [&](const node::CharPred& n) { return n.pred == std::get<node::CharPred>(bn).pred; },
            [&](const node::AnyChar&) { return true; },
            [&](const node::AnyOf& n) { return n.pred == std::get<node::AnyOf>(bn).pred; },
            [&](const node::NoneOf& n) { return n.pred == std::get<node::NoneOf>(bn).pred; },
            [&](const node::EndOfInput&) { return true; },
            [&](const node::Sequence& n) { return all_equal(n.items, std::get<node::Sequence>(bn).items); },
            [&](const node::FirstOf& n) {
                return all_equal(n.alternatives, std::get<node::FirstOf>(bn).alternatives);
            },
            [&](const node::Repeat& n) {
                const auto& m = std::get<node::Repeat>(bn);
                return n.kind == m.kind && n.collect == m.collect && structural_equal(n.inner, m.inner);
            },
            [&](const node::AndPredicate& n) {
                return structural_equal(n.inner, std::get<node::AndPredicate>(bn).inner);
            },
            [&](const node::NotPredicate& n) {
                return structural_equal(n.inner, std::get<node::NotPredicate>(bn).inner);
            },
            [&](const node::Capture& n) {
                const auto& m = std::get<node::Capture>(bn);
                return n.tag == m.tag && structural_equal(n.inner, m.inner);
            },
            [&](const node::Push& n) { return n.values == std::get<node::Push>(bn).values; },
            [&](const node::Drop& n) { return n.count == std::get<node::Drop>(bn).count; },
            [&](const node::Action& n) {
                const auto& m = std::get<node::Action>(bn);
                return n.def == m.def || (n.def->name == m.def->name && n.def->effect == m.def->effect);
            },
            [&](const node::RuleRef& n) { return n.name == std::get<node::RuleRef>(bn).name; },
            [&](const node::Quiet& n) { return structural_equal(n.inner, std::get<node::Quiet>(bn).inner); },
            [&](const node::UnrolledStr& n) { return n.text == std::get<node::UnrolledStr>(bn).text; },
            [&](const node::CharSetMask& n) {
                const auto& m = std::get<node::CharSetMask>(bn);
                return n.mask == m.mask && n.high == m.high;
            },
        },
        a->node());
}

namespace {

// Binding strength, loosest first.
enum Level { choice = 0, sequence = 1, prefix = 2, suffix = 3, primary = 4 };

Level level_of(const RuleExpr& e) {
    if (e.is<node::FirstOf>())
        return choice;
    if (e.is<node::Sequence>())
        return sequence;
    if (e.is<node::AndPredicate>() || e.is<node::NotPredicate>())
        return prefix;
    if (e.is<node::Repeat>())
        return suffix;
    return primary;
}

std::string mask_text(const AsciiMask& mask, bool high) {
    return high ? mask_notation(~mask, true) : mask_notation(mask, false);
}

void print(const RuleExpr& e, Level ctx, std::string& out);

void print_list(const std::vector<ExprPtr>& items, std::string_view sep, Level child, std::string& out) {
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i)
            out += sep;
        print(*items[i], child, out);
    }
}

void print_inner(const RuleExpr& e, Level ctx, std::string& out) {
    std::visit(
        overloaded{
            [&](const node::Ch& n) { out += quote(std::string_view(&n.c, 1), '\''); },
            [&](const node::IgnoreCaseCh& n) { out += "^" + quote(std::string_view(&n.c, 1)); },
            [&](const node::Str& n) { out += quote(n.text); },
            [&](const node::IgnoreCaseStr& n) { out += "^" + quote(n.text); },
            [&](const node::CharPred& n) {
                if (n.pred.high() == CharPredicate::High::custom)
                    out += "<" + n.pred.name() + ">";
                else
                    out += n.pred.notation();
            },
            [&](const node::AnyChar&) { out += '.'; },
            [&](const node::AnyOf& n) { out += n.pred.notation(); },
            [&](const node::NoneOf& n) { out += n.pred.notation(); },
            [&](const node::EndOfInput&) { out += "EOI"; },
            [&](const node::Sequence& n) { print_list(n.items, " ", prefix, out); },
            [&](const node::FirstOf& n) { print_list(n.alternatives, " / ", sequence, out); },
            [&](const node::Repeat& n) {
                print(*n.inner, primary, out);
                out += n.kind == RepetitionKind::optional ? '?' : n.kind == RepetitionKind::zero_or_more ? '*' : '+';
            },
            [&](const node::AndPredicate& n) {
                out += '&';
                print(*n.inner, suffix, out);
            },
            [&](const node::NotPredicate& n) {
                out += '!';
                print(*n.inner, suffix, out);
            },
            [&](const node::Capture& n) {
                out += "capture(";
                print(*n.inner, choice, out);
                out += ')';
            },
            [&](const node::Push& n) {
                out += "push(";
                for (std::size_t i = 0; i < n.values.size(); ++i) {
                    if (i)
                        out += ", ";
                    out += to_string(n.values[i]);
                }
                out += ')';
            },
            [&](const node::Drop& n) { out += n.count == 1 ? "drop" : "drop[" + std::to_string(n.count) + "]"; },
            [&](const node::Action& n) { out += "~> " + n.def->name; },
            [&](const node::RuleRef& n) { out += n.name; },
            [&](const node::Quiet& n) {
                out += "quiet(";
                print(*n.inner, choice, out);
                out += ')';
            },
            [&](const node::UnrolledStr& n) { out += quote(n.text); },
            [&](const node::CharSetMask& n) { out += mask_text(n.mask, n.high); },
        },
        e.node());
    (void)ctx;
}

void print(const RuleExpr& e, Level ctx, std::string& out) {
    const bool wrap = level_of(e) < ctx;
    if (wrap)
        out += '(';
    print_inner(e, ctx, out);
    if (wrap)
        out += ')';
}

} // namespace

std::string to_notation(const RuleExpr& e) {
    std::string out;
    print(e, choice, out);
    return out;
}

std::string terminal_descriptor(const RuleExpr& e) {
    return std::visit(overloaded{
                          [](const node::Ch& n) { return quote(std::string_view(&n.c, 1), '\''); },
                          [](const node::IgnoreCaseCh& n) { return quote(std::string_view(&n.c, 1), '\''); },
                          [](const node::Str& n) { return quote(n.text, '\''); },
                          [](const node::IgnoreCaseStr& n) { return quote(n.text, '\''); },
                          [](const node::UnrolledStr& n) { return quote(n.text, '\''); },
                          [](const node::CharPred& n) { return n.pred.name(); },
                          [](const node::AnyChar&) { return std::string("ANY"); },
                          [](const node::AnyOf& n) { return n.pred.notation(); },
                          [](const node::NoneOf& n) { return n.pred.notation(); },
                          [](const node::EndOfInput&) { return std::string("'EOI'"); },
                          [](const node::CharSetMask& n) {
                              auto canon = predicates::canonical_name(
                                  n.mask, n.high ? CharPredicate::High::all : CharPredicate::High::none);
                              return canon.empty() ? mask_text(n.mask, n.high) : canon;
                          },
                          [&](const auto&) { return to_notation(e); },
                      },
                      e.node());
}

} // namespace stackpeg
