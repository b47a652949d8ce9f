#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace padloc {

/// Number of worker threads used when a call passes degree 0.
unsigned default_parallelism();
void set_default_parallelism(unsigned degree);

/// Work is always split into the same fixed chunks, whatever the thread count,
/// and partial results are combined in chunk order. Results are therefore
/// bitwise identical for every degree.
inline constexpr std::size_t kChunkCount = 64;

/// Runs body(begin, end) over kChunkCount slices of [0, n) and sums the
/// returned partials in chunk order.
std::complex<double> parallel_sum(
    std::size_t n, const std::function<std::complex<double>(std::size_t, std::size_t)>& body,
    unsigned degree = 0);

/// Runs body(i) for every i in [0, n); each index is visited exactly once.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  unsigned degree = 0);

}  // namespace padloc
