#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "generators.hpp"
#include "reference.hpp"
#include "stackpeg/effects.hpp"
#include "stackpeg/engine.hpp"

using namespace stackpeg;
using namespace stackpeg::rules;

namespace {

const Tag A{"A"}, B{"B"}, C{"C"}, D{"D"}, E{"E"}, F{"F"}, G{"G"}, H{"H"}, Int{"Int"};

StackEffect fx(std::vector<Tag> pops, std::vector<Tag> pushes) { return {std::move(pops), std::move(pushes)}; }

std::optional<StackEffect> try_compose(const StackEffect& a, const StackEffect& b) {
    try {
        return seq_compose(a, b);
    } catch (const effect_error&) {
        return std::nullopt;
    }
}

std::vector<EffectErrorKind> error_kinds(const Grammar& g, std::optional<std::string> start = std::nullopt) {
    try {
        check_grammar(g, std::move(start));
    } catch (const effect_error& e) {
        std::vector<EffectErrorKind> out;
        for (const auto& x : e.errors())
            out.push_back(x.kind);
        return out;
    }
    return {};
}

// The calculator through the library API, with distinct Str and Node tags.
Grammar typed_calculator() {
    auto bin = [](const char* l) { return cons(l, 2, tags::Node, tags::Node); };
    Grammar g;
    g.add_rule("InputLine", seq({ref("Expression"), eoi()}));
    g.add_rule("Expression",
               seq({ref("Term"), zero_or_more(first_of({seq({ch('+'), ref("Term"), bin("Add")}),
                                                        seq({ch('-'), ref("Term"), bin("Sub")})}))}),
               StackEffect{{}, {tags::Node}});
    g.add_rule("Term", seq({ref("Factor"), zero_or_more(first_of({seq({ch('*'), ref("Factor"), bin("Mul")}),
                                                                  seq({ch('/'), ref("Factor"), bin("Div")})}))}));
    g.add_rule("Factor", first_of({ref("Number"), seq({ch('('), ref("Expression"), ch(')')})}));
    g.add_rule("Number", seq({capture(one_or_more(pred(predicates::Digit()))), cons("Val", 1, tags::Str, tags::Node)}));
    return elaborate_collecting(validate_grammar(g));
}

} // namespace

TEST(Effects, PrimitiveEffects) {
    Grammar g;
    EXPECT_EQ(primitive_effect(*ch('a'), g), fx({}, {}));
    EXPECT_EQ(primitive_effect(*capture(one_or_more(pred(predicates::Digit()))), g), fx({}, {tags::Str}));
    EXPECT_EQ(primitive_effect(*push(Value::node(tags::Node, "N", {})), g), fx({}, {tags::Node}));
    EXPECT_EQ(primitive_effect(*drop(2), g), fx({Tag::wildcard(), Tag::wildcard()}, {}));
    EXPECT_EQ(primitive_effect(*quiet(capture(ch('a'))), g), fx({}, {tags::Str}));
    EXPECT_EQ(primitive_effect(*and_pred(capture(ch('a'))), g), fx({}, {}));
    EXPECT_EQ(primitive_effect(*cons("N", 2, A, B), g), fx({A, A}, {B}));
}

TEST(Effects, SequenceCompositionExamples) {
    EXPECT_EQ(seq_compose(fx({}, {A}), fx({}, {B})), fx({}, {A, B}));
    EXPECT_EQ(seq_compose(fx({A, B, C}, {D, E, F}), fx({F}, {G, H})), fx({A, B, C}, {D, E, G, H}));
    EXPECT_EQ(seq_compose(fx({A}, {B, C}), fx({D, B, C}, {E, F})), fx({D, A}, {E, F}));
}

TEST(Effects, SequenceMismatch) {
    try {
        seq_compose(fx({}, {A, B}), fx({A, C}, {}));
        FAIL();
    } catch (const effect_error& e) {
        ASSERT_EQ(e.errors().size(), 1u);
        EXPECT_EQ(e.errors()[0].kind, EffectErrorKind::effect_mismatch);
        EXPECT_EQ(e.errors()[0].position, 0u);
        EXPECT_EQ(e.errors()[0].expected, C);
        EXPECT_EQ(e.errors()[0].found, B);
    }
}

TEST(Effects, WildcardIsDirectional) {
    EXPECT_EQ(seq_compose(fx({}, {A}), fx({Tag::wildcard()}, {})), fx({}, {}));
    EXPECT_EQ(seq_compose(fx({}, {Tag::wildcard()}), fx({Tag::wildcard()}, {B})), fx({}, {B}));
    // An unknown value cannot be handed to something that wants an A.
    EXPECT_THROW(seq_compose(fx({}, {Tag::wildcard()}), fx({A}, {B})), effect_error);
    EXPECT_TRUE(conforms(fx({}, {A}), fx({}, {Tag::wildcard()})));
    EXPECT_FALSE(conforms(fx({}, {Tag::wildcard()}), fx({}, {A})));
    EXPECT_TRUE(conforms(fx({Tag::wildcard()}, {}), fx({A}, {})));
    EXPECT_FALSE(conforms(fx({A}, {}), fx({Tag::wildcard()}, {})));
}

TEST(Effects, LookaheadKeepsTags) {
    Grammar g;
    auto y = cons("Y", 1, tags::Str, tags::Node);
    g.add_rule("Ok", seq({capture(ch('a')), and_pred(drop(1)), y}));
    g.add_rule("Bad", seq({capture(ch('a')), push(Value::text(tags::Node, "n")), and_pred(drop(1)), y}));
    EXPECT_THROW(check_grammar(validate_grammar(g)), effect_error);
    Grammar h;
    h.add_rule("Ok", seq({capture(ch('a')), and_pred(drop(1)), y}));
    EXPECT_EQ(*check_grammar(validate_grammar(h)).find("Ok"), fx({}, {tags::Node}));
    // Standalone, the lookahead's result is an unknown value.
    EXPECT_EQ(primitive_effect(*and_pred(drop(1)), h), fx({Tag::wildcard()}, {Tag::wildcard()}));
}

TEST(Effects, ChoiceComposition) {
    std::vector<StackEffect> same{fx({}, {}), fx({}, {})};
    EXPECT_EQ(choice_compose(same), fx({}, {}));
    std::vector<StackEffect> nodes{fx({}, {tags::Node}), fx({}, {tags::Node})};
    EXPECT_EQ(choice_compose(nodes), fx({}, {tags::Node}));
    std::vector<StackEffect> wild{fx({}, {Tag::wildcard()}), fx({}, {A})};
    EXPECT_EQ(choice_compose(wild), fx({}, {Tag::wildcard()}));
    std::vector<StackEffect> needs{fx({Tag::wildcard()}, {}), fx({A}, {})};
    EXPECT_EQ(choice_compose(needs), fx({A}, {}));
    try {
        std::vector<StackEffect> bad{fx({}, {tags::Node}), fx({}, {})};
        choice_compose(bad);
        FAIL();
    } catch (const effect_error& e) {
        ASSERT_EQ(e.errors().size(), 1u);
        EXPECT_EQ(e.errors()[0].kind, EffectErrorKind::branch_effect_mismatch);
        EXPECT_EQ(e.errors()[0].alternative, 1u);
    }
}

// The two branches really do leave different stack sizes behind.
TEST(Effects, ChoiceMismatchIsObservable) {
    Grammar g;
    auto e = first_of({capture(ch('a'), tags::Node), ch('b')});
    EXPECT_EQ(oracle::evaluate(g, e, "a").stack.size(), 1u);
    EXPECT_EQ(oracle::evaluate(g, e, "b").stack.size(), 0u);
}

TEST(Effects, RepetitionExamples) {
    EXPECT_EQ(repetition_effect(fx({Int, Int}, {Int}), RepetitionKind::zero_or_more), fx({Int}, {Int}));
    EXPECT_EQ(repetition_effect(fx({Int, Int}, {Int}), RepetitionKind::optional), fx({Int}, {Int}));
    EXPECT_EQ(repetition_effect(fx({}, {}), RepetitionKind::zero_or_more), fx({}, {}));
    EXPECT_EQ(repetition_effect(fx({Int, Int}, {Int}), RepetitionKind::one_or_more), fx({Int, Int}, {Int}));
    EXPECT_EQ(seq_compose(fx({Int, Int}, {Int}), repetition_effect(fx({Int, Int}, {Int}), RepetitionKind::zero_or_more)),
              fx({Int, Int}, {Int}));
    EXPECT_EQ(repetition_effect(fx({}, {A}), RepetitionKind::zero_or_more), fx({}, {list_of(A)}));
    EXPECT_THROW(repetition_effect(fx({A}, {B}), RepetitionKind::zero_or_more), effect_error);
    EXPECT_THROW(repetition_effect(fx({}, {A, B}), RepetitionKind::zero_or_more), effect_error);
}

TEST(Effects, TypedCalculatorChecks) {
    auto report = check_grammar(typed_calculator());
    ASSERT_NE(report.find("Expression"), nullptr);
    EXPECT_EQ(*report.find("Expression"), fx({}, {tags::Node}));
    EXPECT_EQ(*report.find("InputLine"), fx({}, {tags::Node}));
    EXPECT_EQ(*report.find("Number"), fx({}, {tags::Node}));
}

TEST(Effects, TextualCalculatorChecks) {
    auto report = check_grammar(fixtures::calculator());
    EXPECT_EQ(report.rules.size(), 5u);
    EXPECT_EQ(report.find("Expression")->pushes.size(), 1u);
    EXPECT_TRUE(report.find("Expression")->pops.empty());
}

TEST(Effects, BareDropAtStart) {
    Grammar g;
    g.add_rule("S", drop());
    EXPECT_EQ(error_kinds(validate_grammar(g)), (std::vector<EffectErrorKind>{EffectErrorKind::start_rule_pops}));
}

TEST(Effects, ConsWithTooFewValues) {
    Grammar g;
    g.add_rule("R", seq({capture(ch('a')), ch('b'), cons("N", 2)}));
    g = validate_grammar(g);
    // Composition leaves a net pop; at the start rule that is a pop from the empty stack.
    EXPECT_EQ(primitive_effect(*g.at("R").expr, g), fx({Tag::wildcard()}, {tags::Node}));
    EXPECT_EQ(error_kinds(g), (std::vector<EffectErrorKind>{EffectErrorKind::start_rule_pops}));
    EXPECT_EQ(oracle::evaluate(g, ref("R"), "ab").kind, oracle::Outcome::underflow);
}

TEST(Effects, DeclarationMismatch) {
    Grammar g;
    g.add_rule("S", capture(ch('a')), StackEffect{{}, {tags::Node}});
    EXPECT_EQ(error_kinds(validate_grammar(g)), (std::vector<EffectErrorKind>{EffectErrorKind::effect_mismatch}));
}

TEST(Effects, RecursionNeedsDeclaration) {
    Grammar g;
    g.add_rule("P", first_of({seq({ch('('), ref("P"), ch(')'), cons("P", 1)}), capture(ch('x'), tags::Node)}));
    EXPECT_EQ(error_kinds(validate_grammar(g)),
              (std::vector<EffectErrorKind>{EffectErrorKind::undeclared_recursive_rule}));
    Grammar h;
    h.add_rule("P", first_of({seq({ch('('), ref("P"), ch(')'), cons("P", 1)}), capture(ch('x'), tags::Node)}),
               StackEffect{{}, {tags::Node}});
    EXPECT_TRUE(error_kinds(validate_grammar(h)).empty());
}

TEST(Effects, CollectingElaboration) {
    Grammar g;
    g.add_rule("L", zero_or_more(capture(ch('a'))));
    auto e = elaborate_collecting(validate_grammar(g));
    const auto* rep = e.at("L").expr->as<node::Repeat>();
    ASSERT_NE(rep, nullptr);
    EXPECT_EQ(rep->collect, tags::Str);
    EXPECT_EQ(*check_grammar(e).find("L"), fx({}, {list_of(tags::Str)}));
}

TEST(EffectsProperty, Associativity) {
    gen::Rng rng(41);
    int defined = 0;
    for (int i = 0; i < 10000; ++i) {
        auto a = gen::random_effect(rng), b = gen::random_effect(rng), c = gen::random_effect(rng);
        auto bc = try_compose(b, c);
        auto ab = try_compose(a, b);
        auto left = bc ? try_compose(a, *bc) : std::nullopt;
        auto right = ab ? try_compose(*ab, c) : std::nullopt;
        if (left && right) {
            ++defined;
            ASSERT_EQ(*left, *right) << to_string(a) << " " << to_string(b) << " " << to_string(c);
        }
    }
    EXPECT_GT(defined, 1000);
}

TEST(EffectsProperty, NeutralIdentity) {
    gen::Rng rng(42);
    for (int i = 0; i < 10000; ++i) {
        auto e = gen::random_effect(rng);
        ASSERT_EQ(seq_compose(StackEffect::neutral(), e), e);
        ASSERT_EQ(seq_compose(e, StackEffect::neutral()), e);
    }
}

TEST(EffectsProperty, ReductionFixpoint) {
    gen::Rng rng(43);
    int accepted = 0;
    for (int i = 0; i < 10000; ++i) {
        auto e = gen::random_effect(rng);
        if (rng.chance(0.5) && !e.pops.empty())
            e.pushes.assign(e.pops.end() - rng.between(1, static_cast<int>(e.pops.size())), e.pops.end());
        StackEffect r;
        try {
            r = repetition_effect(e, RepetitionKind::zero_or_more);
        } catch (const effect_error&) {
            continue;
        }
        if (!r.pushes.empty() && r.pushes.front().name().rfind("List<", 0) == 0)
            continue;
        ++accepted;
        ASSERT_EQ(seq_compose(r, r), r) << to_string(e);
    }
    EXPECT_GT(accepted, 1000);
}

TEST(EffectsProperty, CheckedGrammarsNeverUnderflow) {
    gen::Rng rng(44);
    int checked = 0;
    for (int i = 0; i < 6000; ++i) {
        gen::GrammarOptions o;
        o.sloppiness = 0.15;
        o.recursion = rng.chance(0.3);
        Grammar g;
        try {
            g = elaborate_collecting(gen::random_grammar(rng, o));
            check_grammar(g);
        } catch (const effect_error&) {
            continue;
        }
        ++checked;
        for (int k = 0; k < 3; ++k) {
            auto r = run(g, gen::random_input(rng, "abc", 12));
            if (auto* f = std::get_if<InternalFault>(&r.outcome))
                FAIL() << to_string(f->kind) << ": " << f->description;
        }
    }
    EXPECT_GT(checked, 1000);
}
