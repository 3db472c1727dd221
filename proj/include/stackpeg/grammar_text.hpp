#pragma once

#include <optional>
#include <string>

#include "stackpeg/grammar.hpp"

namespace stackpeg {

struct GrammarSource {
    std::string text;
    std::string file_name = "<grammar>";
};

struct ParseOptions {
    /// Overrides the default start rule (the first definition).
    std::optional<std::string> start;
    bool check_effects = true;
};

/// Parses `.peg` notation, validates the result, marks collecting
/// repetitions and checks stack effects. Throws grammar_error; each
/// diagnostic carries the source offset it refers to and a message prefixed
/// with `file:line:column:`.
///
/// The notation uses the single value tag Val: captures and pushes produce
/// Val, `cons` builds Val nodes, and `: (n -> m)` declares arities.
Grammar parse_grammar(const GrammarSource& src, const ParseOptions& options = {});

/// The notation's own grammar, as run by parse_grammar.
const Grammar& notation_grammar();

/// Renders a grammar in the notation. Re-parsing the output of a parsed
/// grammar gives a structurally equal grammar.
std::string to_notation(const Grammar& g);

} // namespace stackpeg
