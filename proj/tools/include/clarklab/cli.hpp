#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace clarklab::cli {

// Exit codes: 0 success, 1 internal error, 2 precondition or malformed
// input, 3 numerically inconclusive.
enum Exit : int { ok = 0, internal = 1, precondition = 2, inconclusive = 3 };

int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace clarklab::cli
