#pragma once

#include <cstddef>
#include <span>

namespace eulerlab {

/// Worker count used by the OpenMP kernels. 0 and 1 both mean sequential.
int thread_limit();
void set_thread_limit(int threads);
/// Reads EULER_LAB_THREADS (if set) into the thread limit.
void init_threads_from_env();

/// Sum with a fixed blocking independent of the thread count, so results are
/// bitwise reproducible across runs and thread settings.
double deterministic_sum(std::span<const double> values);
double deterministic_dot(std::span<const double> a, std::span<const double> b);

}  // namespace eulerlab
