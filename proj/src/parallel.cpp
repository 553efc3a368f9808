#include "eulershape/parallel.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace eulershape {

int worker_count() {
#ifdef _OPENMP
    int n = omp_get_max_threads();
#else
    int n = 1;
#endif
    if (const char* cap = std::getenv("EULERSHAPE_THREADS")) {
        try {
            const int c = std::stoi(cap);
            if (c >= 1 && c < n) n = c;
        } catch (...) {
            // unparseable cap is ignored
        }
    }
    return n < 1 ? 1 : n;
}

}  // namespace eulershape
