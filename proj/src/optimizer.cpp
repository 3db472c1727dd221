#include "stackpeg/optimizer.hpp"

#include <cctype>
#include <functional>
#include <map>
#include <set>

namespace stackpeg {

namespace {

template <class... Ts>
struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Bottom-up rewrite: children first, then `fn` on the rebuilt node.
ExprPtr rewrite(const ExprPtr& e, const std::function<ExprPtr(const ExprPtr&)>& fn) {
    auto rebuilt = std::visit(
        overloaded{
            [&](const node::Sequence& n) -> ExprPtr {
                std::vector<ExprPtr> items;
                bool same = true;
                for (const auto& i : n.items) {
                    items.push_back(rewrite(i, fn));
                    same = same && items.back() == i;
                }
                return same ? e : std::make_shared<const RuleExpr>(node::Sequence{std::move(items)});
            },
            [&](const node::FirstOf& n) -> ExprPtr {
                std::vector<ExprPtr> alts;
                bool same = true;
                for (const auto& a : n.alternatives) {
                    alts.push_back(rewrite(a, fn));
                    same = same && alts.back() == a;
                }
                return same ? e : std::make_shared<const RuleExpr>(node::FirstOf{std::move(alts)});
            },
            [&](const node::Repeat& n) -> ExprPtr {
                auto inner = rewrite(n.inner, fn);
                return inner == n.inner ? e : rules::repeat(n.kind, std::move(inner), n.collect);
            },
            [&](const node::AndPredicate& n) -> ExprPtr {
                auto inner = rewrite(n.inner, fn);
                return inner == n.inner ? e : rules::and_pred(std::move(inner));
            },
            [&](const node::NotPredicate& n) -> ExprPtr {
                auto inner = rewrite(n.inner, fn);
                return inner == n.inner ? e : rules::not_pred(std::move(inner));
            },
            [&](const node::Capture& n) -> ExprPtr {
                auto inner = rewrite(n.inner, fn);
                return inner == n.inner ? e : rules::capture(std::move(inner), n.tag);
            },
            [&](const node::Quiet& n) -> ExprPtr {
                auto inner = rewrite(n.inner, fn);
                return inner == n.inner ? e : rules::quiet(std::move(inner));
            },
            [&](const auto&) -> ExprPtr { return e; },
        },
        e->node());
    return fn(rebuilt);
}

Grammar rewrite_all(const Grammar& g, const std::function<ExprPtr(const ExprPtr&)>& fn) {
    return g.map_rules([&](const RuleDef& r) { return rewrite(r.expr, fn); });
}

std::optional<std::string> literal_text(const RuleExpr& e) {
    if (const auto* c = e.as<node::Ch>())
        return std::string(1, c->c);
    if (const auto* s = e.as<node::Str>())
        return s->text;
    if (const auto* s = e.as<node::UnrolledStr>())
        return s->text;
    return std::nullopt;
}

ExprPtr flatten_node(const ExprPtr& e) {
    if (const auto* s = e->as<node::Sequence>()) {
        std::vector<ExprPtr> flat;
        for (const auto& i : s->items) {
            if (const auto* inner = i->as<node::Sequence>())
                flat.insert(flat.end(), inner->items.begin(), inner->items.end());
            else
                flat.push_back(i);
        }
        std::vector<ExprPtr> merged;
        for (std::size_t i = 0; i < flat.size();) {
            auto text = literal_text(*flat[i]);
            std::size_t j = i + 1;
            if (text) {
                while (j < flat.size())
                    if (auto more = literal_text(*flat[j])) {
                        *text += *more;
                        ++j;
                    } else {
                        break;
                    }
            }
            merged.push_back(text && j - i > 1 ? rules::str(*text) : flat[i]);
            i = j;
        }
        return rules::seq(std::move(merged));
    }
    if (const auto* f = e->as<node::FirstOf>()) {
        std::vector<ExprPtr> flat;
        bool nested = false;
        for (const auto& a : f->alternatives) {
            if (const auto* inner = a->as<node::FirstOf>()) {
                flat.insert(flat.end(), inner->alternatives.begin(), inner->alternatives.end());
                nested = true;
            } else {
                flat.push_back(a);
            }
        }
        return nested ? rules::first_of(std::move(flat)) : e;
    }
    return e;
}

struct MaskSet {
    AsciiMask mask;
    bool high;
};

std::optional<MaskSet> as_mask(const CharPredicate& p) {
    if (p.high() == CharPredicate::High::custom)
        return std::nullopt;
    return MaskSet{p.ascii_mask(), p.high() == CharPredicate::High::all};
}

// Membership of a single-character matcher as a mask, when it has one.
std::optional<MaskSet> single_char_mask(const RuleExpr& e) {
    if (const auto* c = e.as<node::Ch>()) {
        auto u = static_cast<unsigned char>(c->c);
        if (u >= 128)
            return std::nullopt;
        MaskSet m{{}, false};
        m.mask.set(u);
        return m;
    }
    if (const auto* c = e.as<node::IgnoreCaseCh>()) {
        auto u = static_cast<unsigned char>(c->c);
        if (u >= 128)
            return std::nullopt;
        MaskSet m{{}, false};
        m.mask.set(u);
        m.mask.set(static_cast<unsigned char>(std::toupper(u)));
        return m;
    }
    if (const auto* p = e.as<node::CharPred>())
        return as_mask(p->pred);
    if (const auto* p = e.as<node::AnyOf>())
        return as_mask(p->pred);
    if (const auto* p = e.as<node::NoneOf>())
        return as_mask(p->pred);
    if (const auto* m = e.as<node::CharSetMask>())
        return MaskSet{m->mask, m->high};
    return std::nullopt;
}

ExprPtr charset_node(const ExprPtr& e) {
    if (e->is<node::CharPred>() || e->is<node::AnyOf>() || e->is<node::NoneOf>()) {
        if (auto m = single_char_mask(*e))
            return rules::char_set(m->mask, m->high);
        return e;
    }
    const auto* f = e->as<node::FirstOf>();
    if (!f)
        return e;
    std::vector<ExprPtr> out;
    bool changed = false;
    for (std::size_t i = 0; i < f->alternatives.size();) {
        auto m = single_char_mask(*f->alternatives[i]);
        std::size_t j = i + 1;
        if (m) {
            while (j < f->alternatives.size())
                if (auto more = single_char_mask(*f->alternatives[j])) {
                    m->mask |= more->mask;
                    m->high = m->high || more->high;
                    ++j;
                } else {
                    break;
                }
        }
        if (m && j - i > 1) {
            out.push_back(rules::char_set(m->mask, m->high));
            changed = true;
        } else {
            out.push_back(f->alternatives[i]);
        }
        i = j;
    }
    return changed ? rules::first_of(std::move(out)) : e;
}

std::size_t node_count(const RuleExpr& e) {
    return std::visit(overloaded{
                          [](const node::Sequence& n) {
                              std::size_t c = 1;
                              for (const auto& i : n.items)
                                  c += node_count(*i);
                              return c;
                          },
                          [](const node::FirstOf& n) {
                              std::size_t c = 1;
                              for (const auto& a : n.alternatives)
                                  c += node_count(*a);
                              return c;
                          },
                          [](const node::Repeat& n) { return 1 + node_count(*n.inner); },
                          [](const node::AndPredicate& n) { return 1 + node_count(*n.inner); },
                          [](const node::NotPredicate& n) { return 1 + node_count(*n.inner); },
                          [](const node::Capture& n) { return 1 + node_count(*n.inner); },
                          [](const node::Quiet& n) { return 1 + node_count(*n.inner); },
                          [](const auto&) { return std::size_t{1}; },
                      },
                      e.node());
}

void collect_refs(const RuleExpr& e, std::set<std::string>& out) {
    if (const auto* r = e.as<node::RuleRef>()) {
        out.insert(r->name);
        return;
    }
    rewrite(std::make_shared<const RuleExpr>(e), [&](const ExprPtr& x) {
        if (const auto* r = x->as<node::RuleRef>())
            out.insert(r->name);
        return x;
    });
}

constexpr std::size_t inline_limit = 64;

} // namespace

Grammar flatten_chains(const Grammar& g) { return rewrite_all(g, flatten_node); }

Grammar compile_charsets(const Grammar& g) { return rewrite_all(g, charset_node); }

Grammar specialize_literals(const Grammar& g) {
    return rewrite_all(g, [](const ExprPtr& e) {
        if (const auto* s = e->as<node::Str>())
            return rules::unrolled_str(s->text);
        return e;
    });
}

Grammar inline_rules(const Grammar& g) {
    // A rule is recursive when it can reach itself through references.
    std::map<std::string, std::set<std::string>> refs;
    for (const auto& r : g.rules())
        collect_refs(*r.expr, refs[r.name]);
    std::set<std::string> recursive;
    for (const auto& r : g.rules()) {
        std::set<std::string> seen;
        std::vector<std::string> todo(refs[r.name].begin(), refs[r.name].end());
        while (!todo.empty()) {
            auto n = todo.back();
            todo.pop_back();
            if (n == r.name) {
                recursive.insert(r.name);
                break;
            }
            if (seen.insert(n).second)
                for (const auto& m : refs[n])
                    todo.push_back(m);
        }
    }

    std::map<std::string, ExprPtr> done;
    std::function<ExprPtr(const std::string&)> body = [&](const std::string& name) -> ExprPtr {
        if (auto it = done.find(name); it != done.end())
            return it->second;
        const auto& r = g.at(name);
        auto out = recursive.count(name) ? r.expr : rewrite(r.expr, [&](const ExprPtr& e) -> ExprPtr {
            const auto* ref = e->as<node::RuleRef>();
            if (!ref || recursive.count(ref->name) || !g.contains(ref->name))
                return e;
            auto b = body(ref->name);
            return node_count(*b) <= inline_limit ? b : e;
        });
        done.emplace(name, out);
        return out;
    };
    return g.map_rules([&](const RuleDef& r) {
        return rewrite(r.expr, [&](const ExprPtr& e) -> ExprPtr {
            const auto* ref = e->as<node::RuleRef>();
            if (!ref || recursive.count(ref->name) || !g.contains(ref->name))
                return e;
            auto b = body(ref->name);
            return node_count(*b) <= inline_limit ? b : e;
        });
    });
}

std::vector<RewritePass> default_passes() {
    return {{"flatten_chains", flatten_chains},
            {"compile_charsets", compile_charsets},
            {"specialize_literals", specialize_literals}};
}

std::vector<RewritePass> all_passes() {
    auto out = default_passes();
    out.push_back({"inline_rules", inline_rules});
    return out;
}

std::optional<RewritePass> pass_by_name(std::string_view name) {
    for (auto& p : all_passes())
        if (p.name == name)
            return p;
    return std::nullopt;
}

Grammar optimize(const Grammar& g, const std::vector<RewritePass>& passes) {
    Grammar out = g;
    for (const auto& p : passes)
        out = p.transform(out);
    return out;
}

} // namespace stackpeg
