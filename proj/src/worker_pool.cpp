// SPDX-License-Identifier: Apache-2.0
#include "fcoo/worker_pool.hpp"

#include <utility>

namespace fcoo {

WorkerPool::WorkerPool(std::size_t workers) {
  const std::size_t extra = workers > 1 ? workers - 1 : 0;
  threads_.reserve(extra);
  for (std::size_t i = 0; i < extra; ++i) threads_.emplace_back([this] { worker_loop(); });
}

WorkerPool::~WorkerPool() {
  {
    std::lock_guard lock(mutex_);
    stop_ = true;
  }
  wake_.notify_all();
  for (auto& t : threads_) t.join();
}

void WorkerPool::run(std::size_t ntasks, const std::function<void(std::size_t)>& task) {
  if (ntasks == 0) return;
  if (threads_.empty()) {
    for (std::size_t i = 0; i < ntasks; ++i) task(i);
    return;
  }
  {
    std::lock_guard lock(mutex_);
    task_ = &task;
    ntasks_ = ntasks;
    next_ = 0;
    finished_ = 0;
    error_ = nullptr;
    ++generation_;
  }
  wake_.notify_all();
  drain();

  std::unique_lock lock(mutex_);
  done_.wait(lock, [this] { return finished_ == ntasks_; });
  task_ = nullptr;
  if (error_) std::rethrow_exception(std::exchange(error_, nullptr));
}

void WorkerPool::drain() {
  for (;;) {
    std::size_t i = 0;
    const std::function<void(std::size_t)>* task = nullptr;
    {
      std::lock_guard lock(mutex_);
      if (task_ == nullptr || next_ >= ntasks_) return;
      i = next_++;
      task = task_;
    }
    try {
      (*task)(i);
    } catch (...) {
      std::lock_guard lock(mutex_);
      if (!error_) error_ = std::current_exception();
    }
    bool last = false;
    {
      std::lock_guard lock(mutex_);
      last = (++finished_ == ntasks_);
    }
    if (last) done_.notify_all();
  }
}

void WorkerPool::worker_loop() {
  std::size_t seen = 0;
  for (;;) {
    {
      std::unique_lock lock(mutex_);
      wake_.wait(lock, [&] { return stop_ || generation_ != seen; });
      if (stop_) return;
      seen = generation_;
    }
    drain();
  }
}

}  // namespace fcoo
