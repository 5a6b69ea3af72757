#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace strata::log {

enum class Level { Debug = 0, Info = 1, Warn = 2, Error = 3, Off = 4 };

/// Log level comes from the STRATA_LOG env var only (debug|info|warn|error|off).
inline Level threshold() {
  static const Level level = [] {
    const char* env = std::getenv("STRATA_LOG");
    if (!env) return Level::Warn;
    if (std::strcmp(env, "debug") == 0) return Level::Debug;
    if (std::strcmp(env, "info") == 0) return Level::Info;
    if (std::strcmp(env, "warn") == 0) return Level::Warn;
    if (std::strcmp(env, "error") == 0) return Level::Error;
    if (std::strcmp(env, "off") == 0) return Level::Off;
    return Level::Warn;
  }();
  return level;
}

inline void emit(Level level, const char* tag, const std::string& message) {
  if (level < threshold()) return;
  std::fprintf(stderr, "[strata %s] %s\n", tag, message.c_str());
}

inline void debug(const std::string& m) { emit(Level::Debug, "debug", m); }
inline void info(const std::string& m) { emit(Level::Info, "info", m); }
inline void warn(const std::string& m) { emit(Level::Warn, "warn", m); }
inline void error(const std::string& m) { emit(Level::Error, "error", m); }

}  // namespace strata::log
