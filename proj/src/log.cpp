#include "distmon/log.hpp"

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

namespace distmon::log {
namespace {

std::optional<Level> g_threshold;
std::ostream* g_sink = nullptr;

Level from_env() {
    const char* env = std::getenv("DISTMON_LOG");
    if (env == nullptr) return Level::warn;
    const std::string v(env);
    if (v == "error") return Level::error;
    if (v == "info") return Level::info;
    if (v == "debug") return Level::debug;
    return Level::warn;
}

constexpr std::string_view name(Level l) {
    switch (l) {
        case Level::error: return "error";
        case Level::warn: return "warn";
        case Level::info: return "info";
        case Level::debug: return "debug";
    }
    return "?";
}

}  // namespace

Level threshold() {
    if (!g_threshold) g_threshold = from_env();
    return *g_threshold;
}

void set_threshold(Level level) { g_threshold = level; }

void set_sink(std::ostream* sink) { g_sink = sink; }

void write(Level level, std::string_view message) {
    if (static_cast<int>(level) > static_cast<int>(threshold())) return;
    std::ostream& out = g_sink ? *g_sink : std::cerr;
    out << "distmon: " << name(level) << ": " << message << '\n';
}

}  // namespace distmon::log
