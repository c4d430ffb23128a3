#pragma once

#include <iosfwd>

namespace sdr {

/// Entry point of the sdr_bench tool. Returns the process exit code:
/// 0 success, 1 oracle failure or runtime error, 2 usage or configuration error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sdr
