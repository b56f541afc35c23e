#include "smallball/threading.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace smallball {

int apply_thread_cap() {
#ifdef _OPENMP
    if (const char* env = std::getenv("SMALLBALL_THREADS")) {
        try {
            int cap = std::stoi(env);
            if (cap >= 1) omp_set_num_threads(cap);
        } catch (...) {
            // Unparseable value: leave the default alone.
        }
    }
    return omp_get_max_threads();
#else
    return 1;
#endif
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace smallball
