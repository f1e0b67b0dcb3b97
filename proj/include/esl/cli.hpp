#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace esl::cli {

/// Subcommands: train, eval {outlier|classify}, gen, render.
/// Exit codes: 0 success, 1 data/runtime error, 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace esl::cli
