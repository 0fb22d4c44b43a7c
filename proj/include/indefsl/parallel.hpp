#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace indefsl
{

/// Runs body(i) for i in [0, count) on a small pool of threads. Each index is handled exactly
/// once; callers write results into index-addressed slots so the outcome is order independent.
template <typename Body>
void parallel_for(std::size_t count, Body &&body)
{
  const std::size_t workers =
      std::min<std::size_t>(count, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1)
  {
    for (std::size_t i = 0; i < count; i++)
    {
      body(i);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&]() {
    for (std::size_t i = next++; i < count; i = next++)
    {
      try
      {
        body(i);
      }
      catch (...)
      {
        std::lock_guard lock(error_mutex);
        if (!error)
        {
          error = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; w++)
  {
    pool.emplace_back(run);
  }
  run();
  for (auto &t : pool)
  {
    t.join();
  }
  if (error)
  {
    std::rethrow_exception(error);
  }
}

}  // namespace indefsl
