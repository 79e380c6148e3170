#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "spinlock/config.hpp"

namespace spinlock {

struct RunArtifacts {
  // Everything written, primary CSV first.
  std::vector<std::filesystem::path> files;
  // The JSON report that was written alongside (version, config echo,
  // results, wall time).
  std::string report_json;
};

// Worker count resolution: explicit value if > 0, else the SPINLOCK_WORKERS
// environment variable, else hardware concurrency.
int resolve_workers(int configured);

// Static block partition of [0, n) over the workers; fn(i) must be safe to
// call concurrently for distinct i. Rethrows the first worker exception.
void parallel_for(std::size_t n, int workers,
                  const std::function<void(std::size_t)>& fn);

// Executes the configured experiment and writes its outputs next to the
// configured stem. Output content is deterministic for a fixed config and
// seed regardless of the worker count.
RunArtifacts run_experiment(const ExperimentConfig& config);

}  // namespace spinlock
