#include <gtest/gtest.h>

#include <set>

#include "fixtures.hpp"
#include "generators.hpp"
#include "stackpeg/engine.hpp"
#include "stackpeg/errors.hpp"

using namespace stackpeg;
using namespace stackpeg::rules;

namespace {

Grammar single(ExprPtr e) {
    Grammar g;
    g.add_rule("S", std::move(e));
    return validate_grammar(g);
}

ParseError failure_of(const Grammar& g, std::string_view input, std::optional<std::string> start = std::nullopt) {
    auto r = run(g, input, std::move(start));
    if (!std::holds_alternative<ParseFailure>(r.outcome))
        throw std::runtime_error("expected a parse failure");
    return std::get<ParseFailure>(r.outcome).error;
}

Grammar foo() {
    Grammar g;
    g.add_rule("foo", seq({ch('a'), first_of({seq({ch('b'), ch('c')}), seq({ch('b'), ch('d')})})}));
    return validate_grammar(g);
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

} // namespace

TEST(Errors, PositionOf) {
    EXPECT_EQ(position_of("1+2!3", 3), (Position{3, 1, 4}));
    EXPECT_EQ(position_of("", 0), (Position{0, 1, 1}));
    EXPECT_EQ(position_of("ab\ncd", 3), (Position{3, 2, 1}));
    EXPECT_EQ(position_of("ab\ncd", 5), (Position{5, 2, 3}));
    EXPECT_EQ(position_of("ab\ncd", 2), (Position{2, 1, 3}));
}

TEST(Errors, PrincipalIndex) {
    EXPECT_EQ(establish_principal_error_index(fixtures::calculator(), "InputLine", "1+2!3"), 3u);
    EXPECT_EQ(establish_principal_error_index(single(ch('a')), "S", "b"), 0u);
    EXPECT_EQ(establish_principal_error_index(foo(), "foo", "abx"), 2u);
}

TEST(Errors, CalculatorTraces) {
    auto traces = collect_rule_traces(fixtures::calculator(), "InputLine", "1+2!3", 3);
    EXPECT_EQ(traces.size(), 6u);
    std::set<std::string> terminals;
    for (const auto& t : traces) {
        terminals.insert(t.terminal);
        ASSERT_FALSE(t.frames.empty());
        EXPECT_EQ(t.frames.front(), "InputLine");
    }
    EXPECT_EQ(terminals, (std::set<std::string>{"'/'", "'+'", "'*'", "'EOI'", "'-'", "Digit"}));
}

TEST(Errors, CalculatorDigitTraceFrames) {
    auto traces = collect_rule_traces(fixtures::calculator(), "InputLine", "1+2!3", 3);
    auto it = std::find_if(traces.begin(), traces.end(), [](const RuleTrace& t) { return t.terminal == "Digit"; });
    ASSERT_NE(it, traces.end());
    EXPECT_EQ(it->frames,
              (std::vector<std::string>{"InputLine", "Expression", "Term", "Factor", "Number"}));
}

TEST(Errors, SingleTrace) {
    auto traces = collect_rule_traces(single(ch('a')), "S", "b", 0);
    ASSERT_EQ(traces.size(), 1u);
    EXPECT_EQ(traces[0].terminal, "'a'");
    EXPECT_EQ(traces[0].frames, (std::vector<std::string>{"S"}));
}

TEST(Errors, QuietSuppressesTraces) {
    auto g = single(quiet(ch('a')));
    EXPECT_TRUE(collect_rule_traces(g, "S", "b", 0).empty());
    auto err = failure_of(g, "b");
    EXPECT_EQ(first_line(format_error(err, "b")), "Invalid input 'b', expected <nothing> (line 1, column 1):");
}

TEST(Errors, FormatSingle) {
    auto err = failure_of(single(ch('a')), "b");
    EXPECT_EQ(format_error(err, "b"), "Invalid input 'b', expected 'a' (line 1, column 1):\nb\n^");
    EXPECT_EQ(format_error(err, "b", FormatOptions{false}), "Invalid input 'b', expected 'a' (line 1, column 1):\nb");
}

TEST(Errors, FormatEndOfInput) {
    auto g = single(seq({ch('a'), ch('b')}));
    auto err = failure_of(g, "a");
    EXPECT_EQ(err.position.index, 1u);
    EXPECT_EQ(first_line(format_error(err, "a")), "Unexpected end of input, expected 'b' (line 1, column 2):");
}

TEST(Errors, FormatCalculator) {
    auto err = failure_of(fixtures::calculator(), "1+2!3");
    EXPECT_EQ(err.position, (Position{3, 1, 4}));
    EXPECT_EQ(err.principal_position, err.position);
    auto msg = format_error(err, "1+2!3");
    auto head = first_line(msg);
    EXPECT_EQ(head.rfind("Invalid input '!', expected ", 0), 0u);
    EXPECT_NE(head.find(" or "), std::string::npos);
    EXPECT_EQ(head.substr(head.size() - 20), " (line 1, column 4):");
    EXPECT_EQ(msg.substr(head.size() + 1), "1+2!3\n   ^");
}

TEST(Errors, FormatShowsOnlyTheErrorLine) {
    Grammar g;
    g.add_rule("S", seq({str("ab"), ch('\n'), str("cd"), eoi()}));
    g = validate_grammar(g);
    auto err = failure_of(g, "ab\ncx");
    EXPECT_EQ(err.position, (Position{4, 2, 2}));
    EXPECT_EQ(format_error(err, "ab\ncx"), "Invalid input 'x', expected 'cd' (line 2, column 2):\ncx\n ^");
}

TEST(Errors, StringAndClassDescriptors) {
    auto err = failure_of(single(first_of({str("xy"), pred(CharPredicate::from_chars("+-")), eoi()})), "z");
    EXPECT_EQ(err.expected(), (std::vector<std::string>{"'xy'", "[+\\-]", "'EOI'"}));
}

TEST(ErrorsProperty, PrincipalIsMaximalAndTracesSitThere) {
    gen::Rng rng(51);
    int failures = 0;
    for (int i = 0; i < 3000; ++i) {
        auto g = gen::random_grammar(rng);
        auto in = gen::random_input(rng, "abc", 10);
        auto r = run(g, in);
        auto* f = std::get_if<ParseFailure>(&r.outcome);
        if (!f)
            continue;
        ++failures;
        auto p = f->error.position.index;
        EngineOptions opts;
        opts.error_mode = ErrorMode::collect_traces;
        opts.principal_index = p;
        ParserState st(in, opts);
        match_expr(st, ref(g.start()), g);
        ASSERT_EQ(st.stats.max_cursor, p);
        ASSERT_LE(p, in.size());
    }
    EXPECT_GT(failures, 500);
}

TEST(ErrorsProperty, PhasesAreDeterministic) {
    gen::Rng rng(52);
    for (int i = 0; i < 1000; ++i) {
        auto g = gen::random_grammar(rng);
        auto in = gen::random_input(rng, "abc", 10);
        auto p1 = establish_principal_error_index(g, g.start(), in);
        auto p2 = establish_principal_error_index(g, g.start(), in);
        ASSERT_EQ(p1, p2);
        ASSERT_EQ(collect_rule_traces(g, g.start(), in, p1), collect_rule_traces(g, g.start(), in, p1));
    }
}

// Wrapping any body in Quiet changes only the trace set.
TEST(ErrorsProperty, QuietIsTransparent) {
    gen::Rng rng(53);
    for (int i = 0; i < 2000; ++i) {
        auto g = gen::random_grammar(rng);
        auto victim = g.rules()[static_cast<std::size_t>(rng.between(0, static_cast<int>(g.rules().size()) - 1))].name;
        auto q = g.map_rules([&](const RuleDef& r) { return r.name == victim ? quiet(r.expr) : r.expr; });
        auto in = gen::random_input(rng, "abc", 10);
        auto a = run(g, in);
        auto b = run(q, in);
        ASSERT_EQ(a.outcome.index(), b.outcome.index());
        if (auto* s = std::get_if<Success>(&a.outcome)) {
            ASSERT_EQ(s->values, std::get<Success>(b.outcome).values);
        }
        if (auto* f = std::get_if<ParseFailure>(&a.outcome)) {
            ASSERT_EQ(f->error.position, std::get<ParseFailure>(b.outcome).error.position);
        }
        ASSERT_EQ(establish_principal_error_index(g, g.start(), in), establish_principal_error_index(q, q.start(), in));
    }
}

TEST(ErrorsProperty, ExpectedListMatchesTraceTerminals) {
    gen::Rng rng(54);
    for (int i = 0; i < 2000; ++i) {
        gen::GrammarOptions o;
        o.rich_terminals = true;
        auto g = gen::random_grammar(rng, o);
        auto in = gen::random_input(rng, "abc", 10);
        auto r = run(g, in);
        auto* f = std::get_if<ParseFailure>(&r.outcome);
        if (!f)
            continue;
        auto expected = f->error.expected();
        std::set<std::string> listed(expected.begin(), expected.end());
        ASSERT_EQ(listed.size(), expected.size());
        std::set<std::string> terminals;
        for (const auto& t : f->error.traces)
            terminals.insert(t.terminal);
        ASSERT_EQ(listed, terminals);
        auto head = first_line(format_error(f->error, in));
        for (const auto& d : expected)
            ASSERT_NE(head.find(d), std::string::npos) << head;
    }
}
