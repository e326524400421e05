#include "surfns/log.hpp"

#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace surfns::logging {

namespace {

Level parse_env() {
    const char* s = std::getenv("SURFNS_LOG");
    if (!s) return Level::warn;
    if (!std::strcmp(s, "error")) return Level::error;
    if (!std::strcmp(s, "warn")) return Level::warn;
    if (!std::strcmp(s, "info")) return Level::info;
    if (!std::strcmp(s, "debug")) return Level::debug;
    std::fprintf(stderr, "[warn ] unknown SURFNS_LOG value '%s', using warn\n", s);
    return Level::warn;
}

Level g_level = parse_env();

const char* tag(Level lvl) {
    switch (lvl) {
        case Level::error: return "[error]";
        case Level::warn: return "[warn ]";
        case Level::info: return "[info ]";
        default: return "[debug]";
    }
}

} // namespace

Level level() { return g_level; }
void set_level(Level lvl) { g_level = lvl; }

void vlogf(Level lvl, const char* fmt, ...) {
    if (static_cast<int>(lvl) > static_cast<int>(g_level)) return;
    std::fprintf(stderr, "%s ", tag(lvl));
    va_list ap;
    va_start(ap, fmt);
    std::vfprintf(stderr, fmt, ap);
    va_end(ap);
    std::fputc('\n', stderr);
}

} // namespace surfns::logging
