#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace percolab {

// Samples are grouped into fixed chunks; each chunk is reduced in sample
// order and chunk results are merged in chunk order. The result therefore
// depends on neither the worker count nor the scheduling.
inline constexpr std::uint64_t kChunkSize = 1024;

// `make_worker()` is called once per thread and returns a callable
// `(std::uint64_t sample, Acc&)`; it owns the thread's scratch buffers.
// Acc needs a merge(const Acc&) member.
template <class Acc, class MakeAcc, class MakeWorker>
Acc parallel_reduce(std::uint64_t samples, int workers, MakeAcc&& make_acc,
                    MakeWorker&& make_worker) {
  const std::uint64_t chunks = (samples + kChunkSize - 1) / kChunkSize;
  std::vector<std::optional<Acc>> parts(chunks);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_lock;

  auto run = [&] {
    try {
      auto worker = make_worker();
      for (;;) {
        const std::uint64_t c = next.fetch_add(1);
        if (c >= chunks) break;
        Acc acc = make_acc();
        const std::uint64_t end = std::min(samples, (c + 1) * kChunkSize);
        for (std::uint64_t s = c * kChunkSize; s < end; ++s) worker(s, acc);
        parts[c].emplace(std::move(acc));
      }
    } catch (...) {
      std::lock_guard<std::mutex> guard(failure_lock);
      if (!failure) failure = std::current_exception();
      next.store(chunks);
    }
  };

  const int threads = static_cast<int>(std::min<std::uint64_t>(std::max(1, workers), std::max<std::uint64_t>(chunks, 1)));
  if (threads <= 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(run);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  Acc total = make_acc();
  for (auto& part : parts) total.merge(*part);
  return total;
}

}  // namespace percolab
