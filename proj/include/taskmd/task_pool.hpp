#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace taskmd {

// Work-stealing worker pool for barrier-separated task batches. A batch is
// a set of independent tasks (one per subnode in practice); run_batch
// spreads them round-robin over the workers' deques and blocks until every
// task has run. Workers pop their own deque from the back (hot end) and
// steal from the front of other deques when idle, so an unevenly loaded
// batch still keeps all workers busy.
//
// The main thread never executes tasks; it only orchestrates batches and
// reads timers between them. The first exception a batch throws is caught
// and rethrown from run_batch after the batch has drained.
class TaskPool {
 public:
  explicit TaskPool(int workers) : queues_(workers >= 1 ? workers : 1) {
    const int n = workers >= 1 ? workers : 1;
    threads_.reserve(n);
    for (int w = 0; w < n; ++w) {
      threads_.emplace_back([this, w] { worker_loop(w); });
    }
  }

  TaskPool(const TaskPool&) = delete;
  TaskPool& operator=(const TaskPool&) = delete;

  ~TaskPool() {
    {
      std::lock_guard<std::mutex> lock(state_mutex_);
      shutdown_ = true;
    }
    worker_cv_.notify_all();
    for (std::thread& t : threads_) t.join();
  }

  int workers() const { return static_cast<int>(threads_.size()); }

  // Tasks taken from another worker's deque rather than the taker's own.
  std::uint64_t steal_count() const {
    return steals_.load(std::memory_order_relaxed);
  }

  void run_batch(const std::vector<std::function<void()>>& tasks) {
    if (tasks.empty()) return;
    {
      std::lock_guard<std::mutex> lock(state_mutex_);
      batch_ = &tasks;
      done_.store(0, std::memory_order_relaxed);
      total_ = tasks.size();
      error_ = nullptr;
      for (std::size_t t = 0; t < tasks.size(); ++t) {
        Queue& q = queues_[t % queues_.size()];
        std::lock_guard<std::mutex> qlock(q.mutex);
        q.indices.push_back(t);
      }
      generation_ += 1;
    }
    worker_cv_.notify_all();

    std::unique_lock<std::mutex> lock(state_mutex_);
    main_cv_.wait(lock, [this] {
      return done_.load(std::memory_order_acquire) == total_;
    });
    batch_ = nullptr;
    if (error_) std::rethrow_exception(error_);
  }

 private:
  struct Queue {
    std::mutex mutex;
    std::deque<std::size_t> indices;
  };

  bool try_take(int me, std::size_t& out) {
    {
      Queue& own = queues_[me];
      std::lock_guard<std::mutex> lock(own.mutex);
      if (!own.indices.empty()) {
        out = own.indices.back();
        own.indices.pop_back();
        return true;
      }
    }
    for (std::size_t k = 1; k < queues_.size(); ++k) {
      Queue& other = queues_[(me + k) % queues_.size()];
      std::lock_guard<std::mutex> lock(other.mutex);
      if (!other.indices.empty()) {
        out = other.indices.front();
        other.indices.pop_front();
        steals_.fetch_add(1, std::memory_order_relaxed);
        return true;
      }
    }
    return false;
  }

  void worker_loop(int me) {
    std::uint64_t seen_generation = 0;
    for (;;) {
      {
        std::unique_lock<std::mutex> lock(state_mutex_);
        worker_cv_.wait(lock, [this, &seen_generation] {
          return shutdown_ || generation_ != seen_generation;
        });
        if (shutdown_) return;
        seen_generation = generation_;
      }
      std::size_t t;
      while (try_take(me, t)) {
        try {
          (*batch_)[t]();
        } catch (...) {
          std::lock_guard<std::mutex> lock(state_mutex_);
          if (!error_) error_ = std::current_exception();
        }
        if (done_.fetch_add(1, std::memory_order_acq_rel) + 1 == total_) {
          std::lock_guard<std::mutex> lock(state_mutex_);
          main_cv_.notify_one();
        }
      }
    }
  }

  std::vector<Queue> queues_;
  std::vector<std::thread> threads_;

  std::mutex state_mutex_;
  std::condition_variable worker_cv_;
  std::condition_variable main_cv_;
  const std::vector<std::function<void()>>* batch_ = nullptr;
  std::size_t total_ = 0;
  std::atomic<std::size_t> done_{0};
  std::atomic<std::uint64_t> steals_{0};
  std::exception_ptr error_;
  std::uint64_t generation_ = 0;
  bool shutdown_ = false;
};

}  // namespace taskmd
