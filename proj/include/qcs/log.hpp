#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace qcs::log {

enum class Level { error = 0, info = 1, debug = 2 };

// Log verbosity comes from the QCS_LOG environment variable (error|info|debug);
// unset or unrecognized values fall back to error-only.
inline Level level() {
  static Level lv = [] {
    const char* env = std::getenv("QCS_LOG");
    if (env == nullptr) return Level::error;
    if (std::strcmp(env, "debug") == 0) return Level::debug;
    if (std::strcmp(env, "info") == 0) return Level::info;
    return Level::error;
  }();
  return lv;
}

inline void write(Level lv, const std::string& msg) {
  if (static_cast<int>(lv) > static_cast<int>(level())) return;
  const char* tag = lv == Level::error ? "error" : lv == Level::info ? "info" : "debug";
  std::fprintf(stderr, "[qcs:%s] %s\n", tag, msg.c_str());
}

inline void error(const std::string& msg) { write(Level::error, msg); }
inline void info(const std::string& msg) { write(Level::info, msg); }
inline void debug(const std::string& msg) { write(Level::debug, msg); }

}  // namespace qcs::log
