#pragma once

#include <functional>
#include <string>

namespace gradcp::log {

enum class Level { Debug = 0, Info = 1, Warn = 2, Error = 3, Off = 4 };

using Sink = std::function<void(Level, const std::string&)>;

void set_level(Level level);
Level level();

// Replaces the sink (stderr by default). Returns the previous one.
Sink set_sink(Sink sink);

void write(Level level, const std::string& message);

inline void debug(const std::string& m) { write(Level::Debug, m); }
inline void info(const std::string& m) { write(Level::Info, m); }
inline void warn(const std::string& m) { write(Level::Warn, m); }

} // namespace gradcp::log
