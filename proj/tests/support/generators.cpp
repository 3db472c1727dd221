#include "generators.hpp"

#include <functional>

namespace gen {

using namespace stackpeg;
using namespace stackpeg::rules;

namespace {

const Tag V{"V"};

class Builder {
public:
    Builder(Rng& rng, const GrammarOptions& o) : rng_(rng), o_(o) {}

    enum class Kind { neutral, producer };

    ExprPtr terminal() {
        const auto& a = o_.alphabet;
        char c = rng_.pick(a);
        int n = o_.rich_terminals ? rng_.between(0, 12) : rng_.between(0, 5);
        switch (n) {
        case 0:
        case 1: return ch(c);
        case 2: {
            std::string s(1, c);
            s += rng_.pick(a);
            return str(s);
        }
        case 3: return any();
        case 4: return rng_.chance(0.3) ? eoi() : ch(c);
        case 5: return ignore_case(c);
        case 6: return any_of(std::string(1, c) + rng_.pick(a));
        case 7: return none_of(std::string(1, c));
        case 8: return pred(CharPredicate::range('a', 'b'));
        case 9: {
            std::vector<ExprPtr> run;
            for (int i = rng_.between(2, 3); i > 0; --i)
                run.push_back(rng_.chance(0.7) ? ch(rng_.pick(a)) : str(std::string(2, rng_.pick(a))));
            return seq(std::move(run));
        }
        case 10: {
            std::vector<ExprPtr> alts;
            for (int i = rng_.between(2, 3); i > 0; --i)
                alts.push_back(ch(rng_.pick(a)));
            return first_of(std::move(alts));
        }
        case 11: return ignore_case(std::string(1, c) + rng_.pick(a));
        default: return seq({ch(c), first_of({ch(rng_.pick(a)), any_of(std::string(1, rng_.pick(a)))})});
        }
    }

    ExprPtr gen(Kind k, int d) {
        if (o_.sloppiness > 0 && rng_.chance(o_.sloppiness))
            return wild(d);
        return k == Kind::neutral ? neutral(d) : producer(d);
    }

    ExprPtr neutral(int d) {
        if (d <= 0)
            return terminal();
        switch (rng_.between(0, 10)) {
        case 0: return terminal();
        case 1: return seq({gen(Kind::neutral, d - 1), gen(Kind::neutral, d - 1)});
        case 2: return first_of({gen(Kind::neutral, d - 1), gen(Kind::neutral, d - 1)});
        case 3: return optional(gen(Kind::neutral, d - 1));
        case 4: return zero_or_more(gen(Kind::neutral, d - 1));
        case 5: return one_or_more(gen(Kind::neutral, d - 1));
        case 6: return rng_.chance(0.5) ? and_pred(gen(any_kind(), d - 1)) : not_pred(gen(any_kind(), d - 1));
        case 7: return quiet(gen(Kind::neutral, d - 1));
        case 8:
            if (auto r = ref_of(Kind::neutral))
                return r;
            return terminal();
        case 9:
            if (o_.drops)
                return seq({gen(Kind::producer, d - 1), drop()});
            return seq({terminal(), gen(Kind::neutral, d - 1)});
        default:
            if (o_.drops)
                return seq({gen(Kind::producer, d - 1), gen(Kind::producer, d - 1), drop(2)});
            return first_of({gen(Kind::neutral, d - 1), terminal(), gen(Kind::neutral, d - 1)});
        }
    }

    ExprPtr producer(int d) {
        if (d <= 0)
            return rng_.chance(0.6) ? capture(terminal(), V) : push(Value::text(V, "p"));
        switch (rng_.between(0, 10)) {
        case 0: return capture(gen(Kind::neutral, d - 1), V);
        case 1: return push(Value::text(V, std::string(1, rng_.pick(o_.alphabet))));
        case 2: return seq({gen(Kind::neutral, d - 1), gen(Kind::producer, d - 1)});
        case 3: return seq({gen(Kind::producer, d - 1), gen(Kind::neutral, d - 1)});
        case 4: return first_of({gen(Kind::producer, d - 1), gen(Kind::producer, d - 1)});
        case 5: return seq({gen(Kind::producer, d - 1), gen(Kind::producer, d - 1), cons("N", 2, arg_tag(), V)});
        case 6: return seq({gen(Kind::producer, d - 1), cons("W", 1, arg_tag(), V)});
        case 7: {
            // Reduction: fold every further operand into the accumulator.
            auto body = seq({terminal(), gen(Kind::producer, d - 1), cons("R", 2, arg_tag(), V)});
            auto rep = rng_.chance(0.5) ? zero_or_more(body) : rng_.chance(0.5) ? one_or_more(body) : optional(body);
            return seq({gen(Kind::producer, d - 1), rep});
        }
        case 8: {
            auto kind = rng_.pick(std::vector<RepetitionKind>{RepetitionKind::optional, RepetitionKind::zero_or_more,
                                                              RepetitionKind::one_or_more});
            return seq({repeat(kind, seq({terminal(), gen(Kind::producer, d - 1)}), V), cons("L", 1, Tag::wildcard(), V)});
        }
        case 9:
            if (o_.recursion && rng_.chance(0.5))
                return ref("Rec");
            if (auto r = ref_of(Kind::producer))
                return r;
            return capture(terminal(), V);
        default: return seq({gen(Kind::producer, d - 1), gen(Kind::neutral, d - 1)});
        }
    }

    ExprPtr wild(int d) {
        switch (rng_.between(0, 4)) {
        case 0: return drop(static_cast<std::size_t>(rng_.between(1, 2)));
        case 1: return cons("X", static_cast<std::size_t>(rng_.between(0, 3)), arg_tag(), V);
        case 2: return capture(gen(Kind::neutral, d - 1), Tag("S"));
        case 3: return seq({gen(any_kind(), d - 1), cons("Y", 1, Tag("S"), V)});
        default: return zero_or_more(gen(Kind::producer, d - 1));
        }
    }

    Kind any_kind() { return rng_.chance(0.5) ? Kind::neutral : Kind::producer; }
    Tag arg_tag() { return rng_.chance(0.5) ? Tag::wildcard() : V; }

    ExprPtr ref_of(Kind k) {
        std::vector<int> options;
        for (int j = current_ + 1; j < static_cast<int>(kinds_.size()); ++j)
            if (kinds_[static_cast<std::size_t>(j)] == k)
                options.push_back(j);
        if (options.empty())
            return nullptr;
        return ref("R" + std::to_string(rng_.pick(options) + 1));
    }

    Grammar build() {
        const int n = std::max(1, o_.rules);
        for (int i = 0; i < n; ++i)
            kinds_.push_back(any_kind());
        Grammar g;
        for (int i = 0; i < n; ++i) {
            current_ = i;
            g.add_rule("R" + std::to_string(i + 1), gen(kinds_[static_cast<std::size_t>(i)], o_.depth));
        }
        if (o_.recursion) {
            current_ = n;
            char open = o_.alphabet.front();
            char leaf = o_.alphabet.back();
            g.add_rule("Rec",
                       first_of({seq({ch(open), ref("Rec"), cons("P", 1, Tag::wildcard(), V)}), capture(ch(leaf), V)}),
                       StackEffect{{}, {V}});
        }
        return validate_grammar(g);
    }

private:
    Rng& rng_;
    const GrammarOptions& o_;
    std::vector<Kind> kinds_;
    int current_ = 0;
};

} // namespace

Grammar random_grammar(Rng& rng, const GrammarOptions& options) { return Builder(rng, options).build(); }

ExprPtr random_standard_expr(Rng& rng, int depth, const std::string& alphabet) {
    GrammarOptions o;
    o.alphabet = alphabet;
    o.rich_terminals = true;
    std::function<ExprPtr(int)> go = [&](int d) -> ExprPtr {
        Builder b(rng, o);
        if (d <= 0)
            return b.terminal();
        switch (rng.between(0, 7)) {
        case 0: return b.terminal();
        case 1: return seq({go(d - 1), go(d - 1)});
        case 2: return first_of({go(d - 1), go(d - 1)});
        case 3: return optional(go(d - 1));
        case 4: return zero_or_more(go(d - 1));
        case 5: return one_or_more(go(d - 1));
        case 6: return rng.chance(0.5) ? and_pred(go(d - 1)) : not_pred(go(d - 1));
        default: return quiet(go(d - 1));
        }
    };
    return go(depth);
}

std::string random_input(Rng& rng, const std::string& alphabet, int max_len) {
    std::string s;
    for (int n = rng.between(0, max_len); n > 0; --n)
        s += rng.pick(alphabet);
    return s;
}

StackEffect random_effect(Rng& rng, int max_len) {
    static const std::vector<Tag> pool{Tag("A"), Tag("B"), Tag("C"), Tag::wildcard()};
    auto list = [&] {
        std::vector<Tag> ts;
        for (int n = rng.between(0, max_len); n > 0; --n)
            ts.push_back(rng.pick(pool));
        return ts;
    };
    auto pops = list();
    return StackEffect{pops, list()};
}

std::string random_arithmetic(Rng& rng, int depth, bool malformed) {
    std::function<std::string(int)> expr = [&](int d) -> std::string {
        std::string out;
        int terms = rng.between(1, 3);
        for (int i = 0; i < terms; ++i) {
            if (i)
                out += rng.pick(std::string("+-*/"));
            if (d > 0 && rng.chance(0.3))
                out += "(" + expr(d - 1) + ")";
            else
                out += std::to_string(rng.between(0, 999));
        }
        return out;
    };
    auto s = expr(depth);
    if (malformed) {
        static const std::string junk = "+-*/()!x 7";
        auto pos = static_cast<std::size_t>(rng.between(0, static_cast<int>(s.size())));
        switch (rng.between(0, 2)) {
        case 0: s.insert(pos, 1, rng.pick(junk)); break;
        case 1:
            if (pos < s.size())
                s.erase(pos, 1);
            else
                s += rng.pick(junk);
            break;
        default:
            if (pos < s.size())
                s[pos] = rng.pick(junk);
            else
                s += '(';
        }
    }
    return s;
}

std::string large_arithmetic(Rng& rng, std::size_t bytes) {
    std::string s = std::to_string(rng.between(0, 9999));
    while (s.size() < bytes) {
        s += rng.pick(std::string("+-*/"));
        if (rng.chance(0.1))
            s += "(" + random_arithmetic(rng, 1, false) + ")";
        else
            s += std::to_string(rng.between(0, 9999));
    }
    return s;
}

} // namespace gen
