#include "omtl/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace omtl::log {

namespace {
std::atomic<Level> g_level{Level::Warn};
std::mutex g_mutex;

void emit(Level l, std::string_view tag, std::string_view msg) {
  if (l < g_level.load(std::memory_order_relaxed)) return;
  std::lock_guard lock(g_mutex);
  std::clog << "[omtl " << tag << "] " << msg << '\n';
}
}  // namespace

void set_level(Level level) { g_level.store(level, std::memory_order_relaxed); }
Level level() { return g_level.load(std::memory_order_relaxed); }

void debug(std::string_view msg) { emit(Level::Debug, "debug", msg); }
void info(std::string_view msg) { emit(Level::Info, "info", msg); }
void warn(std::string_view msg) { emit(Level::Warn, "warn", msg); }

}  // namespace omtl::log
