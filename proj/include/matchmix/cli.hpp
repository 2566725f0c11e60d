#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace matchmix::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kInvalid = 2, kNotMixed = 3 };

// args excludes the program name. Results go to out, progress and errors to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace matchmix::cli
