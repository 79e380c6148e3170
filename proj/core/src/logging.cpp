#include "spinlock/logging.hpp"

#include <cstdio>
#include <mutex>
#include <utility>

namespace spinlock {

namespace {

std::mutex g_sink_mutex;
WarnSink g_sink;  // empty means stderr default

}  // namespace

void warn(const std::string& message) {
  std::lock_guard<std::mutex> lock(g_sink_mutex);
  if (g_sink) {
    g_sink(message);
  } else {
    std::fprintf(stderr, "[spinlock] warning: %s\n", message.c_str());
  }
}

WarnSink set_warn_sink(WarnSink sink) {
  std::lock_guard<std::mutex> lock(g_sink_mutex);
  std::swap(g_sink, sink);
  return sink;
}

}  // namespace spinlock
