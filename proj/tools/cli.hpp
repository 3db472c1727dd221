#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stackpeg::cli {

enum ExitCode { ok = 0, parse_failure = 1, usage = 2, internal = 3 };

/// `args` excludes the program name. Reads standard input only for `run`
/// without --input/--input-file.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace stackpeg::cli
