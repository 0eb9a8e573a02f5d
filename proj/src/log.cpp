#include "odx/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <string>

namespace odx {

namespace {

LogLevel parse_level(const char* s) {
    if (s == nullptr) return LogLevel::kWarn;
    const std::string v(s);
    if (v == "debug") return LogLevel::kDebug;
    if (v == "info") return LogLevel::kInfo;
    if (v == "warn") return LogLevel::kWarn;
    if (v == "error") return LogLevel::kError;
    if (v == "off") return LogLevel::kOff;
    return LogLevel::kWarn;
}

LogLevel& level_ref() {
    static LogLevel level = parse_level(std::getenv("ODX_LOG"));
    return level;
}

const char* level_tag(LogLevel level) {
    switch (level) {
        case LogLevel::kDebug: return "debug";
        case LogLevel::kInfo: return "info";
        case LogLevel::kWarn: return "warn";
        case LogLevel::kError: return "error";
        default: return "?";
    }
}

}  // namespace

LogLevel log_level() { return level_ref(); }

void set_log_level(LogLevel level) { level_ref() = level; }

void log_message(LogLevel level, std::string_view msg) {
    if (level < level_ref() || level_ref() == LogLevel::kOff) return;
    std::fprintf(stderr, "[odx %s] %.*s\n", level_tag(level), static_cast<int>(msg.size()),
                 msg.data());
}

}  // namespace odx
