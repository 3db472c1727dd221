#include "stackpeg/effects.hpp"

#include <map>
#include <set>

namespace stackpeg {

namespace {

template <class... Ts>
struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Inference hit a rule that already failed; its errors are reported there.
struct poisoned {};

[[noreturn]] void fail(EffectErrorKind kind, std::string message) {
    throw effect_error({EffectError{kind, std::move(message), {}, 0, {}, {}, 0}});
}

class Inference {
public:
    explicit Inference(const Grammar& g) : g_(g) {}

    StackEffect infer(const RuleExpr& e) {
        return std::visit(
            overloaded{
                [&](const node::Sequence& n) {
                    StackEffect acc;
                    for (const auto& i : n.items) {
                        if (const auto* p = lookahead_inner(*i))
                            acc = require(acc, infer(*p).pops);
                        else
                            acc = seq_compose(acc, infer(*i));
                    }
                    return acc;
                },
                [&](const node::FirstOf& n) {
                    std::vector<StackEffect> effects;
                    for (const auto& a : n.alternatives)
                        effects.push_back(infer(*a));
                    return choice_compose(effects);
                },
                [&](const node::Repeat& n) { return repeat(n, infer(*n.inner)); },
                [&](const node::AndPredicate& n) { return predicate(infer(*n.inner)); },
                [&](const node::NotPredicate& n) { return predicate(infer(*n.inner)); },
                [&](const node::Capture& n) {
                    auto inner = infer(*n.inner);
                    inner.pushes.push_back(n.tag);
                    return inner;
                },
                [&](const node::Push& n) {
                    StackEffect out;
                    for (const auto& v : n.values)
                        out.pushes.push_back(v.tag());
                    return out;
                },
                [&](const node::Drop& n) { return StackEffect{std::vector<Tag>(n.count, Tag::wildcard()), {}}; },
                [&](const node::Action& n) { return n.def->effect; },
                [&](const node::RuleRef& n) { return rule_effect(n.name); },
                [&](const node::Quiet& n) { return infer(*n.inner); },
                [&](const auto&) { return StackEffect::neutral(); },
            },
            e.node());
    }

    // Effect a reference to `name` contributes.
    StackEffect rule_effect(const std::string& name) {
        const auto* r = g_.find(name);
        if (!r)
            fail(EffectErrorKind::effect_mismatch, "reference to undefined rule '" + name + "'");
        if (r->declared_effect)
            return *r->declared_effect;
        return body_effect(*r);
    }

    StackEffect body_effect(const RuleDef& r) {
        if (auto it = memo_.find(r.name); it != memo_.end())
            return it->second;
        if (failed_.count(r.name))
            throw poisoned{};
        if (active_.count(r.name))
            throw effect_error({EffectError{EffectErrorKind::undeclared_recursive_rule,
                                            "rule '" + r.name + "' is recursive and needs a declared effect",
                                            r.name, 0, {}, {}, 0}});
        active_.insert(r.name);
        struct Leave {
            std::set<std::string>& active;
            const std::string& name;
            ~Leave() { active.erase(name); }
        } leave{active_, r.name};
        try {
            auto e = infer(*r.expr);
            memo_.emplace(r.name, e);
            return e;
        } catch (const effect_error& err) {
            // Errors belong to the innermost rule being inferred unless already attributed.
            for (auto x : err.errors()) {
                if (x.rule.empty())
                    x.rule = r.name;
                failed_[x.rule].push_back(std::move(x));
            }
            throw poisoned{};
        }
    }

    const std::map<std::string, std::vector<EffectError>>& failures() const { return failed_; }
    void mark_failed(const std::string& name, std::vector<EffectError> errs) { failed_[name] = std::move(errs); }
    bool has_failed(const std::string& name) const { return failed_.count(name) != 0; }

private:
    static const RuleExpr* lookahead_inner(const RuleExpr& e) {
        if (const auto* a = e.as<node::AndPredicate>())
            return a->inner.get();
        if (const auto* n = e.as<node::NotPredicate>())
            return n->inner.get();
        return nullptr;
    }

    // A lookahead inside a sequence leaves the stack as it found it, so the
    // values below keep the tags the earlier items gave them.
    static StackEffect require(const StackEffect& acc, const std::vector<Tag>& needs) {
        seq_compose(acc, StackEffect{needs, needs});
        if (acc.pushes.size() >= needs.size())
            return acc;
        std::vector<Tag> deficit(needs.begin(), needs.end() - static_cast<std::ptrdiff_t>(acc.pushes.size()));
        StackEffect out;
        out.pops = deficit;
        out.pops.insert(out.pops.end(), acc.pops.begin(), acc.pops.end());
        out.pushes = deficit;
        out.pushes.insert(out.pushes.end(), acc.pushes.begin(), acc.pushes.end());
        return out;
    }

    static StackEffect predicate(const StackEffect& inner) {
        // The stack is restored afterwards, but the body still needs its pops present.
        return StackEffect{inner.pops, inner.pops};
    }

    static StackEffect repeat(const node::Repeat& n, const StackEffect& inner) {
        if (n.collect) {
            if (!inner.pops.empty() || inner.pushes.size() != 1 || !conforms(inner.pushes.front(), *n.collect))
                fail(EffectErrorKind::unsupported_repetition_effect,
                     "collecting repetition body must push exactly one " + n.collect->name() + " value, but has " +
                         to_string(inner));
            return StackEffect{{}, {list_of(*n.collect)}};
        }
        if (inner.is_neutral())
            return inner;
        if (inner.pops.empty() && inner.pushes.size() == 1)
            fail(EffectErrorKind::unsupported_repetition_effect,
                 "repetition body " + to_string(inner) + " pushes one value per iteration; mark it collecting");
        auto out = repetition_effect(inner, n.kind);
        if (inner.pops.size() != inner.pushes.size())
            fail(EffectErrorKind::unsupported_repetition_effect,
                 "repetition body " + to_string(inner) + " changes the stack depth on every iteration");
        return out;
    }

    const Grammar& g_;
    std::map<std::string, StackEffect> memo_;
    std::set<std::string> active_;
    std::map<std::string, std::vector<EffectError>> failed_;
};

ExprPtr elaborate(const ExprPtr& e, Inference& inf, bool& changed) {
    return std::visit(
        overloaded{
            [&](const node::Sequence& n) -> ExprPtr {
                std::vector<ExprPtr> items;
                for (const auto& i : n.items)
                    items.push_back(elaborate(i, inf, changed));
                return rules::seq(std::move(items));
            },
            [&](const node::FirstOf& n) -> ExprPtr {
                std::vector<ExprPtr> alts;
                for (const auto& a : n.alternatives)
                    alts.push_back(elaborate(a, inf, changed));
                return rules::first_of(std::move(alts));
            },
            [&](const node::Repeat& n) -> ExprPtr {
                auto inner = elaborate(n.inner, inf, changed);
                auto collect = n.collect;
                if (!collect) {
                    try {
                        auto eff = inf.infer(*inner);
                        if (eff.pops.empty() && eff.pushes.size() == 1) {
                            collect = eff.pushes.front();
                            changed = true;
                        }
                    } catch (const effect_error&) {
                    } catch (const poisoned&) {
                    }
                }
                return rules::repeat(n.kind, std::move(inner), std::move(collect));
            },
            [&](const node::AndPredicate& n) -> ExprPtr { return rules::and_pred(elaborate(n.inner, inf, changed)); },
            [&](const node::NotPredicate& n) -> ExprPtr { return rules::not_pred(elaborate(n.inner, inf, changed)); },
            [&](const node::Capture& n) -> ExprPtr { return rules::capture(elaborate(n.inner, inf, changed), n.tag); },
            [&](const node::Quiet& n) -> ExprPtr { return rules::quiet(elaborate(n.inner, inf, changed)); },
            [&](const auto&) -> ExprPtr { return e; },
        },
        e->node());
}

} // namespace

const StackEffect* EffectReport::find(std::string_view name) const {
    for (const auto& [n, e] : rules)
        if (n == name)
            return &e;
    return nullptr;
}

StackEffect primitive_effect(const RuleExpr& e, const Grammar& g) {
    Inference inf(g);
    try {
        return inf.infer(e);
    } catch (const poisoned&) {
        std::vector<EffectError> all;
        for (const auto& [name, errs] : inf.failures())
            all.insert(all.end(), errs.begin(), errs.end());
        throw effect_error(std::move(all));
    }
}

EffectReport check_grammar(const Grammar& g, std::optional<std::string> start) {
    Inference inf(g);
    EffectReport report;
    std::vector<EffectError> errors;

    for (const auto& r : g.rules()) {
        if (inf.has_failed(r.name))
            continue;
        try {
            auto body = inf.body_effect(r);
            if (r.declared_effect && !conforms(body, *r.declared_effect)) {
                inf.mark_failed(r.name, {EffectError{EffectErrorKind::effect_mismatch,
                                                     "rule '" + r.name + "' is declared " +
                                                         to_string(*r.declared_effect) + " but its body has " +
                                                         to_string(body),
                                                     r.name, 0, {}, {}, 0}});
                continue;
            }
            report.rules.emplace_back(r.name, r.declared_effect ? *r.declared_effect : body);
        } catch (const effect_error&) {
        } catch (const poisoned&) {
        }
    }
    for (const auto& r : g.rules()) {
        auto it = inf.failures().find(r.name);
        if (it != inf.failures().end())
            errors.insert(errors.end(), it->second.begin(), it->second.end());
    }

    const std::string start_name = start.value_or(g.start());
    if (const auto* eff = report.find(start_name); eff && !eff->pops.empty())
        errors.push_back(EffectError{EffectErrorKind::start_rule_pops,
                                     "start rule '" + start_name + "' pops " + std::to_string(eff->pops.size()) +
                                         " value(s) from the empty stack (effect " + to_string(*eff) + ")",
                                     start_name, 0, {}, {}, 0});

    if (!errors.empty())
        throw effect_error(std::move(errors));
    return report;
}

Grammar elaborate_collecting(const Grammar& g) {
    Grammar current = g;
    for (std::size_t round = 0; round <= g.rules().size(); ++round) {
        bool changed = false;
        Inference inf(current);
        Grammar next = current.map_rules([&](const RuleDef& r) { return elaborate(r.expr, inf, changed); });
        current = std::move(next);
        if (!changed)
            break;
    }
    return current;
}

} // namespace stackpeg
