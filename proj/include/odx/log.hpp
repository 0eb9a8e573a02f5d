#ifndef ODX_LOG_HPP_
#define ODX_LOG_HPP_

#include <string_view>

namespace odx {

enum class LogLevel { kDebug = 0, kInfo, kWarn, kError, kOff };

// Effective level comes from ODX_LOG (debug|info|warn|error|off),
// default warn. Resolved once on first use.
LogLevel log_level();
void set_log_level(LogLevel level);

void log_message(LogLevel level, std::string_view msg);

inline void log_debug(std::string_view msg) { log_message(LogLevel::kDebug, msg); }
inline void log_info(std::string_view msg) { log_message(LogLevel::kInfo, msg); }
inline void log_warn(std::string_view msg) { log_message(LogLevel::kWarn, msg); }
inline void log_error(std::string_view msg) { log_message(LogLevel::kError, msg); }

}  // namespace odx

#endif  // ODX_LOG_HPP_
