#pragma once

namespace eulershape {

/// Number of OpenMP workers to use: omp_get_max_threads() capped by the
/// EULERSHAPE_THREADS environment variable when set. Always >= 1.
int worker_count();

}  // namespace eulershape
