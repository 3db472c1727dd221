#include "stackpeg/grammar.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace stackpeg {

namespace {

template <class... Ts>
struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string join_diagnostics(const std::vector<Diagnostic>& ds) {
    std::string out;
    for (const auto& d : ds) {
        if (!out.empty())
            out += "; ";
        out += d.message;
    }
    return out;
}

ExprPtr collapse(const ExprPtr& e) {
    return std::visit(
        overloaded{
            [&](const node::Sequence& n) -> ExprPtr {
                std::vector<ExprPtr> items;
                for (const auto& i : n.items)
                    items.push_back(collapse(i));
                if (items.empty())
                    return e;
                return rules::seq(std::move(items));
            },
            [&](const node::FirstOf& n) -> ExprPtr {
                std::vector<ExprPtr> alts;
                for (const auto& a : n.alternatives)
                    alts.push_back(collapse(a));
                if (alts.empty())
                    return e;
                return rules::first_of(std::move(alts));
            },
            [&](const node::Repeat& n) -> ExprPtr { return rules::repeat(n.kind, collapse(n.inner), n.collect); },
            [&](const node::AndPredicate& n) -> ExprPtr { return rules::and_pred(collapse(n.inner)); },
            [&](const node::NotPredicate& n) -> ExprPtr { return rules::not_pred(collapse(n.inner)); },
            [&](const node::Capture& n) -> ExprPtr { return rules::capture(collapse(n.inner), n.tag); },
            [&](const node::Quiet& n) -> ExprPtr { return rules::quiet(collapse(n.inner)); },
            [&](const auto&) -> ExprPtr { return e; },
        },
        e->node());
}

void for_each_child(const RuleExpr& e, const std::function<void(const RuleExpr&)>& fn) {
    std::visit(overloaded{
                   [&](const node::Sequence& n) {
                       for (const auto& i : n.items)
                           fn(*i);
                   },
                   [&](const node::FirstOf& n) {
                       for (const auto& a : n.alternatives)
                           fn(*a);
                   },
                   [&](const node::Repeat& n) { fn(*n.inner); },
                   [&](const node::AndPredicate& n) { fn(*n.inner); },
                   [&](const node::NotPredicate& n) { fn(*n.inner); },
                   [&](const node::Capture& n) { fn(*n.inner); },
                   [&](const node::Quiet& n) { fn(*n.inner); },
                   [&](const auto&) {},
               },
               e.node());
}

void scan(const RuleExpr& e, const Grammar& g, std::set<std::string>& unresolved, bool& empty_literal) {
    if (const auto* r = e.as<node::RuleRef>(); r && !g.contains(r->name))
        unresolved.insert(r->name);
    if (const auto* s = e.as<node::Str>(); s && s->text.empty())
        empty_literal = true;
    if (const auto* s = e.as<node::IgnoreCaseStr>(); s && s->text.empty())
        empty_literal = true;
    if (const auto* s = e.as<node::UnrolledStr>(); s && s->text.empty())
        empty_literal = true;
    for_each_child(e, [&](const RuleExpr& c) { scan(c, g, unresolved, empty_literal); });
}

// Rules that can be invoked at the entry position of `e`.
void leftmost_refs(const RuleExpr& e, const std::unordered_map<std::string, bool>& nul, std::vector<std::string>& out) {
    if (const auto* r = e.as<node::RuleRef>()) {
        out.push_back(r->name);
        return;
    }
    if (const auto* s = e.as<node::Sequence>()) {
        for (const auto& i : s->items) {
            leftmost_refs(*i, nul, out);
            if (!nullable(*i, nul))
                break;
        }
        return;
    }
    for_each_child(e, [&](const RuleExpr& c) { leftmost_refs(c, nul, out); });
}

} // namespace

Grammar& Grammar::add_rule(std::string name, ExprPtr expr, std::optional<StackEffect> declared) {
    if (index_.count(name))
        throw grammar_error({Diagnostic{DiagnosticKind::duplicate_rule, "duplicate rule '" + name + "'", {name}, {}, {}}});
    if (!expr)
        throw std::invalid_argument("rule '" + name + "' has no expression");
    if (rules_.empty() && start_.empty())
        start_ = name;
    index_.emplace(name, rules_.size());
    rules_.push_back(RuleDef{std::move(name), std::move(expr), std::move(declared)});
    return *this;
}

Grammar& Grammar::set_start(std::string name) {
    start_ = std::move(name);
    return *this;
}

const RuleDef* Grammar::find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    return it == index_.end() ? nullptr : &rules_[it->second];
}

const RuleDef& Grammar::at(std::string_view name) const {
    if (const auto* r = find(name))
        return *r;
    throw std::out_of_range("no rule named '" + std::string(name) + "'");
}

bool structural_equal(const Grammar& a, const Grammar& b) {
    if (a.start() != b.start() || a.rules().size() != b.rules().size())
        return false;
    for (std::size_t i = 0; i < a.rules().size(); ++i) {
        const auto& x = a.rules()[i];
        const auto& y = b.rules()[i];
        if (x.name != y.name || x.declared_effect != y.declared_effect || !structural_equal(x.expr, y.expr))
            return false;
    }
    return true;
}

std::string_view to_string(DiagnosticKind k) {
    switch (k) {
    case DiagnosticKind::syntax: return "SyntaxError";
    case DiagnosticKind::unresolved_ref: return "UnresolvedRef";
    case DiagnosticKind::left_recursion: return "LeftRecursion";
    case DiagnosticKind::empty_literal: return "EmptyLiteral";
    case DiagnosticKind::duplicate_rule: return "DuplicateRule";
    case DiagnosticKind::missing_start: return "MissingStartRule";
    case DiagnosticKind::effect: return "EffectError";
    }
    return "?";
}

grammar_error::grammar_error(std::vector<Diagnostic> diagnostics)
    : std::runtime_error(join_diagnostics(diagnostics)), diagnostics_(std::move(diagnostics)) {}

bool nullable(const RuleExpr& e, const std::unordered_map<std::string, bool>& rule_nullable) {
    return std::visit(
        overloaded{
            [](const node::Ch&) { return false; },
            [](const node::IgnoreCaseCh&) { return false; },
            [](const node::Str& n) { return n.text.empty(); },
            [](const node::IgnoreCaseStr& n) { return n.text.empty(); },
            [](const node::UnrolledStr& n) { return n.text.empty(); },
            [](const node::CharPred&) { return false; },
            [](const node::AnyChar&) { return false; },
            [](const node::AnyOf&) { return false; },
            [](const node::NoneOf&) { return false; },
            [](const node::CharSetMask&) { return false; },
            [](const node::EndOfInput&) { return true; },
            [&](const node::Sequence& n) {
                return std::all_of(n.items.begin(), n.items.end(),
                                   [&](const ExprPtr& i) { return nullable(*i, rule_nullable); });
            },
            [&](const node::FirstOf& n) {
                return std::any_of(n.alternatives.begin(), n.alternatives.end(),
                                   [&](const ExprPtr& a) { return nullable(*a, rule_nullable); });
            },
            [&](const node::Repeat& n) {
                return n.kind != RepetitionKind::one_or_more || nullable(*n.inner, rule_nullable);
            },
            [](const node::AndPredicate&) { return true; },
            [](const node::NotPredicate&) { return true; },
            [&](const node::Capture& n) { return nullable(*n.inner, rule_nullable); },
            [&](const node::Quiet& n) { return nullable(*n.inner, rule_nullable); },
            [](const node::Push&) { return true; },
            [](const node::Drop&) { return true; },
            [](const node::Action&) { return true; },
            [&](const node::RuleRef& n) {
                auto it = rule_nullable.find(n.name);
                return it != rule_nullable.end() && it->second;
            },
        },
        e.node());
}

std::unordered_map<std::string, bool> nullable_rules(const Grammar& g) {
    std::unordered_map<std::string, bool> nul;
    for (const auto& r : g.rules())
        nul[r.name] = false;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& r : g.rules()) {
            if (!nul[r.name] && nullable(*r.expr, nul)) {
                nul[r.name] = true;
                changed = true;
            }
        }
    }
    return nul;
}

Grammar validate_grammar(const Grammar& g) {
    std::vector<Diagnostic> diags;

    if (g.rules().empty() || !g.contains(g.start()))
        diags.push_back({DiagnosticKind::missing_start, "start rule '" + g.start() + "' is not defined", {g.start()}, {}, {}});

    std::set<std::string> reported;
    for (const auto& r : g.rules()) {
        std::set<std::string> unresolved;
        bool empty_literal = false;
        scan(*r.expr, g, unresolved, empty_literal);
        for (const auto& name : unresolved)
            if (reported.insert(name).second)
                diags.push_back({DiagnosticKind::unresolved_ref,
                                 "rule '" + r.name + "' references undefined rule '" + name + "'", {name}, {}, {}});
        if (empty_literal)
            diags.push_back({DiagnosticKind::empty_literal, "rule '" + r.name + "' contains an empty string literal",
                             {r.name}, {}, {}});
    }

    Grammar out = g.map_rules([](const RuleDef& r) { return collapse(r.expr); });

    // Left recursion: a cycle in the "may call at the same position" graph.
    auto nul = nullable_rules(out);
    std::unordered_map<std::string, std::size_t> order;
    std::vector<std::vector<std::size_t>> edges(out.rules().size());
    for (std::size_t i = 0; i < out.rules().size(); ++i)
        order[out.rules()[i].name] = i;
    for (std::size_t i = 0; i < out.rules().size(); ++i) {
        std::vector<std::string> refs;
        leftmost_refs(*out.rules()[i].expr, nul, refs);
        for (const auto& name : refs) {
            auto it = order.find(name);
            if (it != order.end() && std::find(edges[i].begin(), edges[i].end(), it->second) == edges[i].end())
                edges[i].push_back(it->second);
        }
    }

    std::vector<int> color(out.rules().size(), 0);  // 0 new, 1 on stack, 2 done
    std::vector<std::size_t> path;
    std::set<std::vector<std::size_t>> cycles;
    std::function<void(std::size_t)> dfs = [&](std::size_t v) {
        color[v] = 1;
        path.push_back(v);
        for (auto w : edges[v]) {
            if (color[w] == 1) {
                auto from = std::find(path.begin(), path.end(), w);
                std::vector<std::size_t> cycle(from, path.end());
                std::rotate(cycle.begin(), std::min_element(cycle.begin(), cycle.end()), cycle.end());
                cycles.insert(std::move(cycle));
            } else if (color[w] == 0) {
                dfs(w);
            }
        }
        path.pop_back();
        color[v] = 2;
    };
    for (std::size_t v = 0; v < out.rules().size(); ++v)
        if (color[v] == 0)
            dfs(v);

    for (const auto& cycle : cycles) {
        std::vector<std::string> names;
        std::string shown;
        for (auto i : cycle) {
            names.push_back(out.rules()[i].name);
            shown += out.rules()[i].name + " -> ";
        }
        shown += names.front();
        diags.push_back({DiagnosticKind::left_recursion, "left recursion: " + shown, std::move(names), {}, {}});
    }

    if (!diags.empty())
        throw grammar_error(std::move(diags));
    return out;
}

} // namespace stackpeg
