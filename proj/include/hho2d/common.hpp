// Shared error types and small utilities.

#ifndef HHO2D_COMMON_HPP
#define HHO2D_COMMON_HPP

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace hho2d {

/// Invalid geometry or connectivity passed to a mesh builder.
struct MeshError : std::runtime_error {
  explicit MeshError(const std::string& what) : std::runtime_error(what) {}
};

/// Inadmissible (degree, variant, ...) combination or bad driver options.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A solver or eigensolver failed to reach its tolerance.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// The condensed system has no unknowns (mesh without internal faces).
struct EmptySystemError : std::runtime_error {
  explicit EmptySystemError(const std::string& what) : std::runtime_error(what) {}
};

/// Runs fn(i) for i in [0, n) on up to n_threads workers with a static
/// partition. Results must be written to per-index slots so the outcome is
/// independent of the thread count.
inline void parallel_for(std::size_t n, unsigned n_threads,
                         const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  if (n_threads == 0) n_threads = std::thread::hardware_concurrency();
  if (n_threads <= 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  unsigned workers = static_cast<unsigned>(std::min<std::size_t>(n_threads, n));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    std::size_t lo = w * chunk;
    std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn]() {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace hho2d

#endif
