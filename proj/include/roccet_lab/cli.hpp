#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace roccet_lab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

/// Default output directory when -o is absent.
inline constexpr const char* kOutputEnv = "ROCCET_LAB_OUT";

/// Entry point shared by the binary and the tests. args excludes argv[0].
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace roccet_lab::cli
