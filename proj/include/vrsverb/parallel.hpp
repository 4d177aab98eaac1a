// Minimal deterministic parallel map: work items are indexed, each item
// writes only its own slot, so results do not depend on the thread count.
#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace vrsverb {

// Process-wide worker cap, set once from the CLI --jobs flag.
int default_jobs();
void set_default_jobs(int jobs);

void parallel_for(int begin, int end, const std::function<void(int)>& body, int jobs = 0);

}  // namespace vrsverb
