#pragma once

#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace drivesim {

// Fixed set of threads that run index-parallel loops. The calling thread
// takes part in every loop, so a pool of size 1 spawns no threads.
class WorkerPool {
 public:
  // 0 selects std::thread::hardware_concurrency().
  explicit WorkerPool(std::size_t num_workers = 0);
  ~WorkerPool();

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  std::size_t size() const { return threads_.size() + 1; }

  // Calls fn(i) exactly once for every i in [0, n) and returns when all calls
  // have finished. The first exception thrown by any call is rethrown here.
  void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

 private:
  void worker_loop();
  void drain();

  std::vector<std::thread> threads_;
  std::mutex mutex_;
  std::condition_variable wake_;
  std::condition_variable finished_;
  const std::function<void(std::size_t)>* job_ = nullptr;
  std::size_t job_size_ = 0;
  std::size_t next_index_ = 0;
  std::size_t pending_ = 0;    // indices not yet completed
  std::size_t generation_ = 0;
  bool stopping_ = false;
  std::exception_ptr error_;
};

}  // namespace drivesim
