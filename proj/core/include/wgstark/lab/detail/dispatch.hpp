#pragma once

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace wgstark::lab {

template <class Result, class Job>
std::vector<Result> dispatch(const std::vector<Job>& jobs, int workers) {
  std::vector<Result> out(jobs.size());
  const std::size_t nthreads = std::min<std::size_t>(std::max(workers, 1), jobs.size());
  if (nthreads <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) out[i] = jobs[i]();
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (std::size_t t = 0; t < nthreads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < jobs.size(); i = next++) out[i] = jobs[i]();
    });
  }
  for (auto& th : pool) th.join();
  return out;
}

}  // namespace wgstark::lab
