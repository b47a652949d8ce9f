#include "padloc/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace padloc {

namespace {
std::atomic<unsigned> g_degree{0};

unsigned resolve(unsigned degree) {
  if (degree == 0) degree = default_parallelism();
  return std::max(1u, degree);
}

// Runs task(c) for c in [0, count) on `degree` threads, rethrowing the first
// exception after all threads join.
void run_chunks(std::size_t count, unsigned degree, const std::function<void(std::size_t)>& task) {
  degree = static_cast<unsigned>(std::min<std::size_t>(degree, count));
  if (degree <= 1) {
    for (std::size_t c = 0; c < count; ++c) task(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= count) return;
      try {
        task(c);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(degree - 1);
  for (unsigned t = 1; t < degree; ++t) threads.emplace_back(worker);
  worker();
  for (auto& th : threads) th.join();
  if (error) std::rethrow_exception(error);
}
}  // namespace

unsigned default_parallelism() {
  const unsigned d = g_degree.load();
  if (d != 0) return d;
  return std::max(1u, std::thread::hardware_concurrency());
}

void set_default_parallelism(unsigned degree) { g_degree.store(degree); }

std::complex<double> parallel_sum(
    std::size_t n, const std::function<std::complex<double>(std::size_t, std::size_t)>& body,
    unsigned degree) {
  if (n == 0) return {0.0, 0.0};
  std::vector<std::complex<double>> partial(kChunkCount);
  run_chunks(kChunkCount, resolve(degree), [&](std::size_t c) {
    const std::size_t begin = n * c / kChunkCount;
    const std::size_t end = n * (c + 1) / kChunkCount;
    partial[c] = begin < end ? body(begin, end) : std::complex<double>(0.0, 0.0);
  });
  std::complex<double> total(0.0, 0.0);
  for (const auto& x : partial) total += x;
  return total;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, unsigned degree) {
  if (n == 0) return;
  const std::size_t chunks = std::min(n, kChunkCount);
  run_chunks(chunks, resolve(degree), [&](std::size_t c) {
    const std::size_t begin = n * c / chunks;
    const std::size_t end = n * (c + 1) / chunks;
    for (std::size_t i = begin; i < end; ++i) body(i);
  });
}

}  // namespace padloc
