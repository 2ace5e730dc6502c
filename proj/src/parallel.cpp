#include "eulerlab/parallel.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <string>
#include <vector>

namespace eulerlab {

namespace {
int g_threads = -1;

constexpr std::size_t kBlock = 4096;
}  // namespace

int thread_limit() {
  if (g_threads < 0) g_threads = omp_get_max_threads();
  return std::max(1, g_threads);
}

void set_thread_limit(int threads) { g_threads = std::max(0, threads); }

void init_threads_from_env() {
  if (const char* env = std::getenv("EULER_LAB_THREADS")) {
    try {
      set_thread_limit(std::stoi(env));
    } catch (const std::exception&) {
      // unparsable values leave the default in place
    }
  }
}

double deterministic_sum(std::span<const double> values) {
  const std::size_t nblocks = (values.size() + kBlock - 1) / kBlock;
  std::vector<double> partial(nblocks, 0.0);
  const int threads = thread_limit();
#pragma omp parallel for schedule(static) num_threads(threads) if (threads > 1 && nblocks > 1)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nblocks); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    const std::size_t hi = std::min(values.size(), lo + kBlock);
    double s = 0.0;
    for (std::size_t k = lo; k < hi; ++k) s += values[k];
    partial[static_cast<std::size_t>(b)] = s;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

double deterministic_dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = std::min(a.size(), b.size());
  const std::size_t nblocks = (n + kBlock - 1) / kBlock;
  std::vector<double> partial(nblocks, 0.0);
  const int threads = thread_limit();
#pragma omp parallel for schedule(static) num_threads(threads) if (threads > 1 && nblocks > 1)
  for (std::ptrdiff_t blk = 0; blk < static_cast<std::ptrdiff_t>(nblocks); ++blk) {
    const std::size_t lo = static_cast<std::size_t>(blk) * kBlock;
    const std::size_t hi = std::min(n, lo + kBlock);
    double s = 0.0;
    for (std::size_t k = lo; k < hi; ++k) s += a[k] * b[k];
    partial[static_cast<std::size_t>(blk)] = s;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace eulerlab
