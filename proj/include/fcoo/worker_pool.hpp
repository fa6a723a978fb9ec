// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace fcoo {

/// Fixed-size pool that runs a batch of independent tasks and waits for all of
/// them. The calling thread takes part in every batch, so a pool of size 1
/// spawns no threads at all.
class WorkerPool {
 public:
  explicit WorkerPool(std::size_t workers = std::thread::hardware_concurrency());
  ~WorkerPool();

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  std::size_t size() const { return threads_.size() + 1; }

  /// Calls `task(i)` for every i in [0, ntasks). Rethrows the first exception
  /// raised by any task after the batch has drained.
  void run(std::size_t ntasks, const std::function<void(std::size_t)>& task);

 private:
  void worker_loop();
  void drain();

  std::vector<std::thread> threads_;
  std::mutex mutex_;
  std::condition_variable wake_;
  std::condition_variable done_;
  const std::function<void(std::size_t)>* task_ = nullptr;
  std::size_t ntasks_ = 0;
  std::size_t next_ = 0;
  std::size_t finished_ = 0;
  std::size_t generation_ = 0;
  bool stop_ = false;
  std::exception_ptr error_;
};

}  // namespace fcoo
