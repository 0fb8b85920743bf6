#pragma once

namespace toolwear {

// Full command-line driver; returns the process exit code.
// 0 success, 2 config error, 3 inference failure, 4 I/O error.
int run_cli(int argc, const char* const* argv);

}  // namespace toolwear
