#pragma once

#include <ostream>
#include <string_view>

namespace distmon::log {

enum class Level { error = 0, warn = 1, info = 2, debug = 3 };

/// Threshold read once from DISTMON_LOG (error|warn|info|debug; default warn).
Level threshold();
void set_threshold(Level level);

/// Diagnostics sink; defaults to std::cerr. Data never goes here.
void set_sink(std::ostream* sink);

void write(Level level, std::string_view message);

inline void error(std::string_view m) { write(Level::error, m); }
inline void warn(std::string_view m) { write(Level::warn, m); }
inline void info(std::string_view m) { write(Level::info, m); }
inline void debug(std::string_view m) { write(Level::debug, m); }

}  // namespace distmon::log
