#pragma once

#include <cstdlib>
#include <thread>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace isoc {

// Worker count from ISOC_WORKERS, else hardware concurrency.
inline int default_workers() {
    if (const char* env = std::getenv("ISOC_WORKERS")) {
        const int v = std::atoi(env);
        if (v >= 1)
            return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(i) for i in [0, count). workers <= 1 takes the serial reference
// path; otherwise the loop is distributed with OpenMP. Each index writes
// only its own outputs, so both paths produce identical results and the
// outcome is independent of the worker count. fn must not throw.
template <class F>
void parallel_for_index(long count, int workers, F&& fn) {
    if (workers <= 1) {
        for (long i = 0; i < count; ++i)
            fn(i);
        return;
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(workers)
    for (long i = 0; i < count; ++i)
        fn(i);
#else
    for (long i = 0; i < count; ++i)
        fn(i);
#endif
}

} // namespace isoc
