#pragma once

#include <string>
#include <vector>

namespace spinlock {

// Embedded ready-to-run configurations, one per reproduced figure. Returns
// nullptr for unknown names.
const char* preset_json(const std::string& name);

std::vector<std::string> preset_names();

}  // namespace spinlock
