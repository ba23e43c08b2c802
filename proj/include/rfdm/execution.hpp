#pragma once

#include <cstddef>

namespace rfdm {

/// Selects between the serial reference kernels and their OpenMP versions.
/// Both produce bitwise-identical output; the serial path is kept as the
/// testing reference.
enum class Execution { serial, parallel };

/// Number of OpenMP threads the parallel kernels will use (1 without OpenMP).
std::size_t max_threads();

/// Sets the OpenMP thread count for subsequent parallel kernels.
void set_threads(std::size_t n);

}  // namespace rfdm
