#pragma once

#include <functional>
#include <string>

namespace spinlock {

// Minimal warning channel. The engine emits warnings for non-fatal drift
// (hermiticity corrections, dropped fast-rotating terms, regime checks).
// Default sink writes to stderr; tests install their own sink to assert on
// emitted messages.

using WarnSink = std::function<void(const std::string&)>;

void warn(const std::string& message);

// Replaces the sink and returns the previous one. Pass nullptr to restore
// the stderr default.
WarnSink set_warn_sink(WarnSink sink);

}  // namespace spinlock
