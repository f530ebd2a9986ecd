#pragma once

#include <string>
#include <vector>

namespace trackaudit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitPartialFailure = 2;

/// Entry point behind main(). args excludes the program name.
/// Exit codes: 0 success, 1 fatal configuration error (nothing was audited),
/// 2 batch completed with per-item failures (counts printed).
int run(const std::vector<std::string>& args);

}  // namespace trackaudit::cli
