#pragma once

namespace smallball {

// Applies the SMALLBALL_THREADS cap to OpenMP if the variable is set.
// Returns the number of threads that will be used.
int apply_thread_cap();

// Current OpenMP thread budget (after any cap).
int max_threads();

} // namespace smallball
