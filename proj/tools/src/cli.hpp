#pragma once

#include <iosfwd>

namespace hnodal::cli {

/// Runs one command line. Returns the process exit code: 0 success, 1 usage
/// or config error, 2 domain error, 3 accuracy error, 4 capacity error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hnodal::cli
