#pragma once

#include <cstddef>
#include <functional>

namespace gradon {

// Worker count used by parallel_for. 0 selects hardware concurrency.
// The GRADON_THREADS environment variable, when set, wins over this.
void set_thread_count(int count);
int effective_thread_count();

// Runs fn(i) for i in [begin, end). Tasks must write disjoint outputs;
// chunking is contiguous so results never depend on scheduling.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& fn);

}  // namespace gradon
