#pragma once

namespace qclust {

// Parallelism budget: QUBITS_THREADS caps it, hardware concurrency is the
// default, and the floor is one.
int thread_budget();

}  // namespace qclust
