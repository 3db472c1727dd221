#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "stackpeg/grammar_text.hpp"

namespace fixtures {

inline std::string path(const std::string& relative) { return std::string(STACKPEG_SOURCE_DIR) + "/" + relative; }

inline std::string read(const std::string& relative) {
    std::ifstream in(path(relative), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline stackpeg::Grammar load(const std::string& relative, stackpeg::ParseOptions options = {}) {
    return stackpeg::parse_grammar({read(relative), relative}, options);
}

inline const stackpeg::Grammar& calculator() {
    static const auto g = load("grammars/calculator.peg");
    return g;
}

} // namespace fixtures
