#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ldscreen::cli {

/// Exit codes: 0 success, 1 runtime failure, 2 usage or input error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace ldscreen::cli
