#pragma once

namespace nvdr {

// argv front end for the nvdr binary. returns the process exit code:
// 0 success, 1 config or usage error, 2 numerical failure
int run_cli(int argc, const char* const* argv);

}  // namespace nvdr
