#pragma once

namespace surfns::logging {

enum class Level { error = 0, warn = 1, info = 2, debug = 3 };

/// Current level; initialised once from the SURFNS_LOG environment variable
/// (error|warn|info|debug, default warn).
Level level();
void set_level(Level lvl);

void vlogf(Level lvl, const char* fmt, ...)
#if defined(__GNUC__)
    __attribute__((format(printf, 2, 3)))
#endif
    ;

} // namespace surfns::logging

#define SURFNS_ERROR(...) ::surfns::logging::vlogf(::surfns::logging::Level::error, __VA_ARGS__)
#define SURFNS_WARN(...) ::surfns::logging::vlogf(::surfns::logging::Level::warn, __VA_ARGS__)
#define SURFNS_INFO(...) ::surfns::logging::vlogf(::surfns::logging::Level::info, __VA_ARGS__)
#define SURFNS_DEBUG(...) ::surfns::logging::vlogf(::surfns::logging::Level::debug, __VA_ARGS__)
