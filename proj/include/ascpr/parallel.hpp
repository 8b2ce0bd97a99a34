#pragma once

#include <algorithm>

#include <omp.h>

#include "ascpr/error.hpp"

namespace ascpr {

/// Loops shorter than this run inline on the calling thread. Every kernel
/// computes each index identically whichever path runs it, so the cutoff
/// never changes results.
inline constexpr Index kParallelGrain = 512;

/// Static-schedule parallel loop over [begin, end) on `workers` threads.
/// `fn(i)` must only write state owned by index i.
template <class Fn>
void parallel_for(int workers, Index begin, Index end, Fn&& fn) {
  if (workers <= 1 || end - begin < kParallelGrain) {
    for (Index i = begin; i < end; ++i) fn(i);
    return;
  }
#pragma omp parallel for num_threads(workers) schedule(static)
  for (Index i = begin; i < end; ++i) fn(i);
}

/// Runs `fn(chunk)` for chunk = 0..chunks-1, one chunk per thread.
template <class Fn>
void parallel_chunks(int chunks, Fn&& fn) {
  if (chunks <= 1) {
    fn(0);
    return;
  }
#pragma omp parallel for num_threads(chunks) schedule(static, 1)
  for (int c = 0; c < chunks; ++c) fn(c);
}

/// Half-open row range of chunk `c` out of `chunks` contiguous chunks of n.
struct RowRange {
  Index begin;
  Index end;
};

inline RowRange chunk_range(Index n, int chunks, int c) {
  Index const base = n / chunks;
  Index const extra = n % chunks;
  Index const begin = c * base + std::min<Index>(c, extra);
  return {begin, begin + base + (c < extra ? 1 : 0)};
}

}  // namespace ascpr
