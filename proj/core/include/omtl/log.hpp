#pragma once

#include <string_view>

namespace omtl::log {

enum class Level { Debug = 0, Info = 1, Warn = 2, Quiet = 3 };

/// Process-wide threshold; messages below it are dropped. Default Warn.
void set_level(Level level);
Level level();

void debug(std::string_view msg);
void info(std::string_view msg);
void warn(std::string_view msg);

}  // namespace omtl::log
