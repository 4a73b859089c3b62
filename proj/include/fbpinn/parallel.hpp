#pragma once

namespace fbpinn {

// Fixed chunk width for parallel loops over collocation points. Partial
// results are kept per chunk and reduced in chunk order, so sums are
// bit-identical at any worker count.
inline constexpr int kPointChunk = 256;

inline int n_chunks(int n) { return (n + kPointChunk - 1) / kPointChunk; }

template <class Fn>
void parallel_chunks(int n, Fn&& fn) {
  const int chunks = n_chunks(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (int c = 0; c < chunks; ++c) {
    const int begin = c * kPointChunk;
    const int end = begin + kPointChunk < n ? begin + kPointChunk : n;
    fn(c, begin, end);
  }
}

}  // namespace fbpinn
