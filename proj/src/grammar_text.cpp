#include "stackpeg/grammar_text.hpp"

#include <map>

#include "stackpeg/effects.hpp"
#include "stackpeg/engine.hpp"

namespace stackpeg {

namespace {

const Tag syn_tag{"Syn"};

// Intermediate result of one notation construct.
struct Syn {
    ExprPtr expr;
    std::string text;
    std::size_t offset = 0;
    std::optional<StackEffect> effect;
    std::vector<std::pair<std::string, std::size_t>> refs;  // rule references and where they occur
};

using Out = std::optional<std::vector<Value>>;
using Args = std::span<const Value>;

Value wrap(Syn s) { return Value::opaque<Syn>(syn_tag, std::make_shared<const Syn>(std::move(s))); }
const Syn& unwrap(const Value& v) { return *v.as_opaque<Syn>(); }
Syn of(ExprPtr e) {
    Syn s;
    s.expr = std::move(e);
    return s;
}
Out one(Syn s) { return Out{std::vector<Value>{wrap(std::move(s))}}; }

std::vector<const Syn*> items(const Value& list) {
    std::vector<const Syn*> out;
    for (const auto& v : list.as_node().children)
        out.push_back(&unwrap(v));
    return out;
}

Syn derive(const Syn& from, ExprPtr e) {
    Syn s;
    s.expr = std::move(e);
    s.refs = from.refs;
    return s;
}

ExprPtr act(std::string name, std::vector<Tag> pops, std::function<Out(Args, const ActionContext&)> fn) {
    return rules::action(std::move(name), StackEffect{std::move(pops), {syn_tag}}, std::move(fn));
}

ExprPtr act(std::string name, std::vector<Tag> pops, std::function<Out(Args)> fn) {
    return act(std::move(name), std::move(pops), [fn = std::move(fn)](Args a, const ActionContext&) { return fn(a); });
}

ExprPtr unary(std::string name, ExprPtr (*make)(ExprPtr)) {
    return act(std::move(name), {syn_tag}, [make](Args a) {
        const auto& s = unwrap(a[0]);
        return one(derive(s, make(s.expr)));
    });
}

int hex_digit(char c) {
    if (c >= '0' && c <= '9')
        return c - '0';
    if (c >= 'a' && c <= 'f')
        return c - 'a' + 10;
    if (c >= 'A' && c <= 'F')
        return c - 'A' + 10;
    return -1;
}

// Decodes one escape starting after the backslash at raw[i]; advances i past it.
char unescape(std::string_view raw, std::size_t& i) {
    char c = raw[i++];
    switch (c) {
    case 'n': return '\n';
    case 't': return '\t';
    case 'r': return '\r';
    case 'x':
        if (i + 2 <= raw.size() && hex_digit(raw[i]) >= 0 && hex_digit(raw[i + 1]) >= 0) {
            char v = static_cast<char>(hex_digit(raw[i]) * 16 + hex_digit(raw[i + 1]));
            i += 2;
            return v;
        }
        return 'x';
    default: return c;
    }
}

std::string decode(std::string_view raw) {
    std::string out;
    for (std::size_t i = 0; i < raw.size();) {
        if (raw[i] == '\\' && i + 1 < raw.size()) {
            ++i;
            out += unescape(raw, i);
        } else {
            out += raw[i++];
        }
    }
    return out;
}

CharPredicate decode_class(std::string_view raw) {
    bool negated = false;
    std::size_t i = 0;
    if (!raw.empty() && raw[0] == '^') {
        negated = true;
        i = 1;
    }
    struct Atom {
        char c;
        bool escaped;
    };
    std::vector<Atom> atoms;
    while (i < raw.size()) {
        if (raw[i] == '\\' && i + 1 < raw.size()) {
            ++i;
            atoms.push_back({unescape(raw, i), true});
        } else {
            atoms.push_back({raw[i++], false});
        }
    }
    AsciiMask mask;
    auto set = [&](char c) {
        auto u = static_cast<unsigned char>(c);
        if (u < 128)
            mask.set(u);
    };
    for (std::size_t k = 0; k < atoms.size(); ++k) {
        if (k + 2 < atoms.size() && atoms[k + 1].c == '-' && !atoms[k + 1].escaped) {
            auto lo = static_cast<unsigned char>(atoms[k].c);
            auto hi = static_cast<unsigned char>(atoms[k + 2].c);
            for (unsigned c = lo; c <= hi; ++c)
                set(static_cast<char>(c));
            k += 2;
        } else {
            set(atoms[k].c);
        }
    }
    CharPredicate p(mask);
    return negated ? p.negated() : p;
}

std::optional<std::size_t> to_count(const std::string& digits) {
    try {
        return std::stoul(digits);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

Grammar build_notation_grammar() {
    using namespace rules;
    const Tag syn_list = list_of(syn_tag);
    const Tag str_list = list_of(tags::Str);
    const auto sp = ref("Spacing");
    auto tok = [&](const std::string& s) { return seq({s.size() == 1 ? ch(s[0]) : str(s), sp}); };
    const auto ident_start = pred((predicates::Alpha() | CharPredicate::from_chars("_")).named("IdentStart"));
    const auto ident_cont = pred((predicates::AlphaNum() | CharPredicate::from_chars("_")).named("IdentCont"));
    auto quoted = [&](char q) {
        return capture(zero_or_more(first_of({ref("Escape"), seq({not_pred(ch(q)), not_pred(ch('\n')), any()})})));
    };

    Grammar g;
    g.add_rule("Grammar", seq({sp, repeat(RepetitionKind::one_or_more, ref("Definition"), syn_tag), eoi()}));
    g.add_rule("Definition",
               seq({ref("Name"), repeat(RepetitionKind::optional, ref("EffectDecl"), syn_tag), tok("<-"), ref("Choice"),
                    act("definition", {syn_tag, syn_list, syn_tag}, [](Args a) {
                        const auto& name = unwrap(a[0]);
                        auto decl = items(a[1]);
                        Syn s = derive(unwrap(a[2]), unwrap(a[2]).expr);
                        s.text = name.text;
                        s.offset = name.offset;
                        if (!decl.empty())
                            s.effect = decl.front()->effect;
                        return one(std::move(s));
                    })}));
    g.add_rule("EffectDecl", seq({tok(":"), tok("("), ref("Integer"), tok("->"), ref("Integer"), tok(")"),
                                  act("effect", {tags::Str, tags::Str}, [](Args a) -> Out {
                                      auto in = to_count(a[0].as_text());
                                      auto out = to_count(a[1].as_text());
                                      if (!in || !out)
                                          return std::nullopt;
                                      Syn s;
                                      s.effect = StackEffect{std::vector<Tag>(*in, Tag::wildcard()),
                                                             std::vector<Tag>(*out, Tag::wildcard())};
                                      return one(std::move(s));
                                  })}));
    g.add_rule("Choice",
               seq({ref("Sequence"), repeat(RepetitionKind::zero_or_more, seq({tok("/"), ref("Sequence")}), syn_tag),
                    act("choice", {syn_tag, syn_list}, [](Args a) {
                        Syn s = unwrap(a[0]);
                        auto rest = items(a[1]);
                        if (rest.empty())
                            return one(std::move(s));
                        std::vector<ExprPtr> alts{s.expr};
                        for (const auto* r : rest) {
                            alts.push_back(r->expr);
                            s.refs.insert(s.refs.end(), r->refs.begin(), r->refs.end());
                        }
                        s.expr = first_of(std::move(alts));
                        return one(std::move(s));
                    })}),
               StackEffect{{}, {syn_tag}});
    g.add_rule("Sequence", seq({repeat(RepetitionKind::one_or_more, ref("Prefixed"), syn_tag),
                                act("sequence", {syn_list}, [](Args a) {
                                    Syn s;
                                    std::vector<ExprPtr> parts;
                                    for (const auto* p : items(a[0])) {
                                        parts.push_back(p->expr);
                                        s.refs.insert(s.refs.end(), p->refs.begin(), p->refs.end());
                                    }
                                    s.expr = seq(std::move(parts));
                                    return one(std::move(s));
                                })}));
    g.add_rule("Prefixed", first_of({seq({tok("&"), ref("Suffixed"), unary("and", and_pred)}),
                                     seq({tok("!"), ref("Suffixed"), unary("not", not_pred)}), ref("Suffixed")}));
    g.add_rule("Suffixed", seq({ref("Primary"), optional(first_of({seq({tok("?"), unary("optional", optional)}),
                                                                     seq({tok("*"), unary("zero_or_more", zero_or_more)}),
                                                                     seq({tok("+"), unary("one_or_more", one_or_more)})}))}));
    g.add_rule(
        "Primary",
        first_of({
            seq({tok("("), ref("Choice"), tok(")")}),
            ref("CharLit"),
            ref("StringLit"),
            ref("IgnoreCaseLit"),
            ref("Class"),
            seq({tok("."), act("any", {}, [](Args) { return one(of(any())); })}),
            seq({str("EOI"), not_pred(ident_cont), sp, act("eoi", {}, [](Args) { return one(of(eoi())); })}),
            seq({tok("quiet("), ref("Choice"), tok(")"), unary("quiet", quiet)}),
            seq({tok("capture("), ref("Choice"), tok(")"), act("capture", {syn_tag}, [](Args a) {
                     const auto& s = unwrap(a[0]);
                     return one(derive(s, capture(s.expr, tags::Val)));
                 })}),
            seq({tok("push("), first_of({ref("StringLit"), ref("CharLit")}), tok(")"),
                 act("push", {syn_tag}, [](Args a) { return one(of(push(Value::text(tags::Val, unwrap(a[0]).text)))); })}),
            seq({str("drop"), not_pred(ident_cont),
                 repeat(RepetitionKind::optional, seq({ch('['), sp, ref("Integer"), ch(']')}), tags::Str), sp,
                 act("drop", {str_list}, [](Args a) -> Out {
                     const auto& given = a[0].as_node().children;
                     auto n = given.empty() ? std::optional<std::size_t>(1) : to_count(given.front().as_text());
                     if (!n || *n == 0)
                         return std::nullopt;
                     return one(of(drop(*n)));
                 })}),
            seq({tok("~>"), tok("cons("), ref("Identifier"), tok(","), ref("Integer"), tok(")"),
                 act("cons", {tags::Str, tags::Str}, [](Args a) -> Out {
                     auto n = to_count(a[1].as_text());
                     if (!n)
                         return std::nullopt;
                     return one(of(cons(a[0].as_text(), *n, Tag::wildcard(), tags::Val)));
                 })}),
            seq({ref("Name"), not_pred(first_of({ch(':'), str("<-")})), act("reference", {syn_tag}, [](Args a) {
                     const auto& n = unwrap(a[0]);
                     Syn s = of(ref(n.text));
                     s.refs.emplace_back(n.text, n.offset);
                     return one(std::move(s));
                 })}),
        }));
    g.add_rule("CharLit", seq({ch('\''), quoted('\''), ch('\''), sp, act("char_literal", {tags::Str}, [](Args a) {
                                   auto text = decode(a[0].as_text());
                                   Syn s = of(text.size() == 1 ? ch(text[0]) : str(text));
                                   s.text = std::move(text);
                                   return one(std::move(s));
                               })}));
    g.add_rule("StringLit", seq({ch('"'), quoted('"'), ch('"'), sp, act("string_literal", {tags::Str}, [](Args a) {
                                     auto text = decode(a[0].as_text());
                                     Syn s = of(str(text));
                                     s.text = std::move(text);
                                     return one(std::move(s));
                                 })}));
    g.add_rule("IgnoreCaseLit",
               seq({ch('^'), ch('"'), quoted('"'), ch('"'), sp, act("ignore_case", {tags::Str}, [](Args a) {
                        auto text = decode(a[0].as_text());
                        return one(of(text.size() == 1 ? ignore_case(text[0]) : ignore_case(text)));
                    })}));
    g.add_rule("Class",
               seq({ch('['), capture(zero_or_more(first_of({ref("Escape"), seq({not_pred(ch(']')), not_pred(ch('\n')), any()})}))),
                    ch(']'), sp,
                    act("char_class", {tags::Str}, [](Args a) { return one(of(pred(decode_class(a[0].as_text())))); })}));
    g.add_rule("Escape", seq({ch('\\'), any()}));
    g.add_rule("Name", seq({act("mark", {}, [](Args, const ActionContext& ctx) {
                                Syn s;
                                s.offset = ctx.cursor;
                                return one(std::move(s));
                            }),
                            ref("Identifier"), act("name", {syn_tag, tags::Str}, [](Args a) {
                                Syn s = unwrap(a[0]);
                                s.text = a[1].as_text();
                                return one(std::move(s));
                            })}));
    g.add_rule("Identifier", seq({capture(seq({ident_start, zero_or_more(ident_cont)})), sp}));
    g.add_rule("Integer", seq({capture(one_or_more(pred(predicates::Digit()))), sp}));
    g.add_rule("Spacing", quiet(zero_or_more(first_of(
                              {any_of(" \t\r\n"), seq({ch('#'), zero_or_more(seq({not_pred(ch('\n')), any()}))})}))));
    return validate_grammar(g);
}

std::string located(const GrammarSource& src, std::optional<std::size_t> offset, const std::string& message) {
    if (!offset)
        return src.file_name + ": " + message;
    auto p = position_of(src.text, *offset);
    return src.file_name + ":" + std::to_string(p.line) + ":" + std::to_string(p.column) + ": " + message;
}

} // namespace

const Grammar& notation_grammar() {
    static const Grammar g = build_notation_grammar();
    return g;
}

Grammar parse_grammar(const GrammarSource& src, const ParseOptions& options) {
    auto syntax = [&](std::optional<std::size_t> offset, const std::string& message) {
        return grammar_error({Diagnostic{DiagnosticKind::syntax, located(src, offset, message), {}, offset, {}}});
    };

    auto result = run(notation_grammar(), src.text);
    if (auto* f = std::get_if<ParseFailure>(&result.outcome))
        throw syntax(f->error.position.index, "syntax error\n" + format_error(f->error, src.text));
    if (auto* f = std::get_if<InternalFault>(&result.outcome))
        throw syntax(std::nullopt, f->description);

    const auto& values = std::get<Success>(result.outcome).values;
    Grammar g;
    std::vector<Diagnostic> diags;
    std::map<std::string, std::size_t> def_offset;
    std::vector<std::pair<std::string, std::size_t>> refs;
    for (const auto* def : items(values.front())) {
        if (g.contains(def->text)) {
            diags.push_back({DiagnosticKind::duplicate_rule,
                             located(src, def->offset, "duplicate rule '" + def->text + "'"), {def->text}, def->offset, {}});
            continue;
        }
        def_offset[def->text] = def->offset;
        refs.insert(refs.end(), def->refs.begin(), def->refs.end());
        g.add_rule(def->text, def->expr, def->effect);
    }
    if (options.start)
        g.set_start(*options.start);
    if (!diags.empty())
        throw grammar_error(std::move(diags));

    auto offset_of_rule = [&](const std::string& name) -> std::optional<std::size_t> {
        auto it = def_offset.find(name);
        if (it == def_offset.end())
            return std::nullopt;
        return it->second;
    };

    Grammar validated;
    try {
        validated = validate_grammar(g);
    } catch (const grammar_error& err) {
        for (auto d : err.diagnostics()) {
            if (d.kind == DiagnosticKind::unresolved_ref) {
                for (const auto& [name, at] : refs)
                    if (name == d.names.front()) {
                        d.offset = at;
                        break;
                    }
            } else if (!d.names.empty()) {
                d.offset = offset_of_rule(d.names.front());
            }
            d.message = located(src, d.offset, std::string(to_string(d.kind)) + ": " + d.message);
            diags.push_back(std::move(d));
        }
        throw grammar_error(std::move(diags));
    }

    Grammar elaborated = elaborate_collecting(validated);
    if (options.check_effects) {
        try {
            check_grammar(elaborated);
        } catch (const effect_error& err) {
            for (const auto& e : err.errors()) {
                auto at = offset_of_rule(e.rule);
                diags.push_back({DiagnosticKind::effect,
                                 located(src, at, std::string(to_string(e.kind)) + ": " + e.message),
                                 {e.rule}, at, e.kind});
            }
            throw grammar_error(std::move(diags));
        }
    }
    return elaborated;
}

std::string to_notation(const Grammar& g) {
    std::string out;
    for (const auto& r : g.rules()) {
        out += r.name;
        if (r.declared_effect)
            out += " : (" + std::to_string(r.declared_effect->pops.size()) + " -> " +
                   std::to_string(r.declared_effect->pushes.size()) + ")";
        out += " <- " + to_notation(r.expr) + "\n";
    }
    return out;
}

} // namespace stackpeg
