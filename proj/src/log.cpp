#include "stm/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <mutex>

namespace stm {

LogLevel log_level() {
  static LogLevel level = [] {
    const char* env = std::getenv("STM_LOG");
    if (env == nullptr) return LogLevel::kWarn;
    std::string s(env);
    if (s == "error") return LogLevel::kError;
    if (s == "warn") return LogLevel::kWarn;
    if (s == "info") return LogLevel::kInfo;
    if (s == "debug") return LogLevel::kDebug;
    return LogLevel::kWarn;
  }();
  return level;
}

void log_msg(LogLevel level, const std::string& msg) {
  if (static_cast<int>(level) > static_cast<int>(log_level())) return;
  static std::mutex mu;
  static const char* names[] = {"error", "warn", "info", "debug"};
  std::lock_guard<std::mutex> lock(mu);
  std::fprintf(stderr, "[stm %s] %s\n", names[static_cast<int>(level)], msg.c_str());
}

}  // namespace stm
