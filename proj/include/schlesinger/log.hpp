#pragma once

#include <iostream>
#include <string_view>

namespace schlesinger {

enum class LogLevel { error = 0, info = 1, debug = 2 };

/// Level parsed once from the SCHLESINGER_LOG environment variable
/// ("error" | "info" | "debug"; default "error").  All log output goes to
/// stderr so that report streams on stdout stay byte-deterministic.
LogLevel log_level();

void log_line(LogLevel level, std::string_view msg);

inline void log_error(std::string_view msg) { log_line(LogLevel::error, msg); }
inline void log_info(std::string_view msg) { log_line(LogLevel::info, msg); }
inline void log_debug(std::string_view msg) { log_line(LogLevel::debug, msg); }

}  // namespace schlesinger
