#include "rfdm/execution.hpp"

#include <omp.h>

namespace rfdm {

std::size_t max_threads() { return static_cast<std::size_t>(omp_get_max_threads()); }

void set_threads(std::size_t n) { omp_set_num_threads(static_cast<int>(n == 0 ? 1 : n)); }

}  // namespace rfdm
