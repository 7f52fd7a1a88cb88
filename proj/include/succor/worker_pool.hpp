#pragma once

#include <condition_variable>
#include <cstddef>
#include <deque>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace succor {

/// Fixed set of threads draining a FIFO of jobs. Jobs must not throw; any
/// exception escaping a job is swallowed. The destructor finishes queued jobs.
class WorkerPool {
public:
    explicit WorkerPool(std::size_t threads = 2);
    ~WorkerPool();

    WorkerPool(const WorkerPool&) = delete;
    WorkerPool& operator=(const WorkerPool&) = delete;

    void post(std::function<void()> job);
    /// Blocks until the queue is empty and no job is running.
    void wait_idle();

private:
    void run();

    std::mutex mutex_;
    std::condition_variable work_cv_;
    std::condition_variable idle_cv_;
    std::deque<std::function<void()>> jobs_;
    std::size_t running_ = 0;
    bool stopping_ = false;
    std::vector<std::jthread> threads_;
};

}  // namespace succor
