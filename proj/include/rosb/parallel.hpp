#pragma once

#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rosb::par {

enum class Exec { serial, openmp };

namespace detail {
inline Exec& exec_mode() {
#ifdef _OPENMP
  static Exec mode = Exec::openmp;
#else
  static Exec mode = Exec::serial;
#endif
  return mode;
}
inline int& thread_count() {
  static int n = 0;  // 0 = runtime default
  return n;
}
}  // namespace detail

inline void set_exec(Exec e) { detail::exec_mode() = e; }
inline Exec exec() { return detail::exec_mode(); }

inline void set_num_threads(int n) { detail::thread_count() = n < 0 ? 0 : n; }
inline int num_threads() { return detail::thread_count(); }

// Data-parallel loop over [0, n). Iterations must be independent; any merging
// of results happens after the loop, in index order, so output never depends
// on the execution mode or thread count.
template <class F>
void parallel_for(std::size_t n, F&& body) {
#ifdef _OPENMP
  if (exec() == Exec::openmp && n > 1) {
    const int nt = num_threads();
    if (nt > 0) {
#pragma omp parallel for schedule(static) num_threads(nt)
      for (long long i = 0; i < static_cast<long long>(n); ++i)
        body(static_cast<std::size_t>(i));
    } else {
#pragma omp parallel for schedule(static)
      for (long long i = 0; i < static_cast<long long>(n); ++i)
        body(static_cast<std::size_t>(i));
    }
    return;
  }
#endif
  for (std::size_t i = 0; i < n; ++i) body(i);
}

// Blocked accumulation: per_item(i, acc) adds item i's contribution into a
// block-local accumulator; block partials are then reduced serially in block
// order. Serial and OpenMP execution perform the identical sequence of
// floating-point additions, so the result is bit-identical in both modes.
template <class Acc, class F>
void blocked_accumulate(std::size_t n, std::size_t block_size, const Acc& zero,
                        F&& per_item, Acc& out) {
  if (block_size == 0) block_size = 1;
  const std::size_t n_blocks = (n + block_size - 1) / block_size;
  std::vector<Acc> partials(n_blocks, zero);
  parallel_for(n_blocks, [&](std::size_t b) {
    const std::size_t lo = b * block_size;
    const std::size_t hi = lo + block_size < n ? lo + block_size : n;
    for (std::size_t i = lo; i < hi; ++i) per_item(i, partials[b]);
  });
  out = zero;
  for (std::size_t b = 0; b < n_blocks; ++b) out.add(partials[b]);
}

}  // namespace rosb::par
