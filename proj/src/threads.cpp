#include "qclust/threads.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <cstring>
#include <thread>

namespace qclust {

int thread_budget() {
  int budget = static_cast<int>(std::thread::hardware_concurrency());
  if (budget < 1) budget = 1;
  if (const char* env = std::getenv("QUBITS_THREADS")) {
    int requested = 0;
    const auto [ptr, ec] =
        std::from_chars(env, env + std::strlen(env), requested);
    if (ec == std::errc() && *ptr == '\0' && requested >= 1)
      budget = std::min(budget, requested);
  }
  return budget;
}

}  // namespace qclust
