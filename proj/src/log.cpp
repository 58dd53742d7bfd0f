#include "schlesinger/log.hpp"

#include <cstdlib>
#include <string>

namespace schlesinger {

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("SCHLESINGER_LOG");
    if (env == nullptr) return LogLevel::error;
    const std::string s(env);
    if (s == "debug") return LogLevel::debug;
    if (s == "info") return LogLevel::info;
    return LogLevel::error;
  }();
  return level;
}

void log_line(LogLevel level, std::string_view msg) {
  if (static_cast<int>(level) > static_cast<int>(log_level())) return;
  const char* tag = level == LogLevel::error  ? "error"
                    : level == LogLevel::info ? "info"
                                              : "debug";
  std::cerr << "[" << tag << "] " << msg << "\n";
}

}  // namespace schlesinger
