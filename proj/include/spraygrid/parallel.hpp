#pragma once

#include <cstddef>
#include <functional>

namespace spraygrid {

// Process-wide parallelism cap. The CLI sets this from --threads; library
// callers that pass threads == 0 inherit it.
int thread_cap();
void set_thread_cap(int n);

// Runs fn(i) for i in [0,n). Work items must be independent and write only
// their own output slots, so results are identical for any thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  int threads = 0);

} // namespace spraygrid
