#pragma once

#include <string>
#include <vector>

#include "splitchain/error.hpp"

namespace splitchain::cli {

// Exit codes: 0 success, 2 input error, 3 state error, 4 internal error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitState = 3;
inline constexpr int kExitInternal = 4;

int exit_code_for(ErrorKind kind);

// Entry point shared by the binary and the tests. args excludes argv[0].
int run(const std::vector<std::string>& args);

}  // namespace splitchain::cli
