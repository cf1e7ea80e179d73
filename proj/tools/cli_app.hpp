#pragma once

#include <iosfwd>

namespace mveq::cli {

/// Full command-line front end, callable in-process for tests.
/// Exit codes: 0 success/pass, 1 analytic failure (failed verification, no
/// root found, indeterminate classification), 2 usage or input error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace mveq::cli
