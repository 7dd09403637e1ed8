#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace ocpc {

// Diagnostics go to stderr so they never contaminate machine-readable stdout.
// Level is read once from OCPC_LOG_LEVEL (error|warn|info|debug), default warn.
enum class LogLevel { error = 0, warn = 1, info = 2, debug = 3 };

inline LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("OCPC_LOG_LEVEL");
    if (env == nullptr) return LogLevel::warn;
    if (std::strcmp(env, "error") == 0) return LogLevel::error;
    if (std::strcmp(env, "warn") == 0) return LogLevel::warn;
    if (std::strcmp(env, "info") == 0) return LogLevel::info;
    if (std::strcmp(env, "debug") == 0) return LogLevel::debug;
    return LogLevel::warn;
  }();
  return level;
}

inline void log_msg(LogLevel level, const std::string& msg) {
  if (level > log_level()) return;
  static const char* tags[] = {"error", "warn", "info", "debug"};
  std::fprintf(stderr, "[ocpc %s] %s\n", tags[static_cast<int>(level)],
               msg.c_str());
}

inline void log_error(const std::string& msg) { log_msg(LogLevel::error, msg); }
inline void log_warn(const std::string& msg) { log_msg(LogLevel::warn, msg); }
inline void log_info(const std::string& msg) { log_msg(LogLevel::info, msg); }
inline void log_debug(const std::string& msg) { log_msg(LogLevel::debug, msg); }

}  // namespace ocpc
