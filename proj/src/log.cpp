#include "gradcp/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace gradcp::log {
namespace {

std::atomic<Level> g_level{Level::Warn};
std::mutex g_mutex;

const char* tag(Level level) {
    switch (level) {
        case Level::Debug: return "debug";
        case Level::Info: return "info";
        case Level::Warn: return "warning";
        case Level::Error: return "error";
        case Level::Off: break;
    }
    return "";
}

Sink& sink() {
    static Sink s = [](Level level, const std::string& message) {
        std::cerr << "gradcp " << tag(level) << ": " << message << '\n';
    };
    return s;
}

} // namespace

void set_level(Level level) { g_level = level; }
Level level() { return g_level; }

Sink set_sink(Sink s) {
    std::lock_guard<std::mutex> lock(g_mutex);
    Sink previous = std::move(sink());
    sink() = std::move(s);
    return previous;
}

void write(Level lvl, const std::string& message) {
    if (lvl < g_level.load() || lvl == Level::Off) return;
    std::lock_guard<std::mutex> lock(g_mutex);
    if (sink()) sink()(lvl, message);
}

} // namespace gradcp::log
